#pragma once

// Black-box uncertainty from pairwise similarity: eigenvalue sum (EigV),
// degree-deficit trace (Deg), and eigenvector-embedding eccentricity
// (ECC) of the symmetric normalized graph Laplacian.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "rague/errors.hpp"

namespace rague {

/// Symmetric weighted adjacency over B responses plus the derived degree
/// matrix and normalized Laplacian L = I - D^{-1/2} W D^{-1/2}.
/// W_ii == 1 always, so D_ii >= 1 and D^{-1/2} is well defined.
struct SimilarityGraph {
    Eigen::MatrixXd W;
    Eigen::MatrixXd D;
    Eigen::MatrixXd L;

    Eigen::Index size() const { return W.rows(); }
};

/// Symmetrize a raw pairwise score matrix: W_ij = (a_ij + a_ji)/2 for
/// i != j, W_ii = 1.
inline SimilarityGraph build_similarity_graph(const Eigen::MatrixXd& a) {
    const Eigen::Index b = a.rows();
    if (b < 2 || a.cols() != b)
        throw InvalidSimilarity("similarity matrix must be square with B >= 2");
    if (!a.allFinite()) throw InvalidSimilarity("non-finite similarity entries");
    if (a.minCoeff() < 0.0 || a.maxCoeff() > 1.0)
        throw InvalidSimilarity("similarity entries must lie in [0,1]");

    SimilarityGraph g;
    g.W = (a + a.transpose()) / 2.0;
    g.W.diagonal().setOnes();
    g.D = Eigen::MatrixXd::Zero(b, b);
    g.D.diagonal() = g.W.rowwise().sum();
    const Eigen::VectorXd d_inv_sqrt = g.D.diagonal().array().rsqrt();
    g.L = Eigen::MatrixXd::Identity(b, b) -
          d_inv_sqrt.asDiagonal() * g.W * d_inv_sqrt.asDiagonal();
    g.L = (g.L + g.L.transpose()) / 2.0;  // kill asymmetric rounding noise
    return g;
}

namespace detail {

struct EigenPairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, matching order, deterministic convention
};

// Deterministic eigendecomposition convention: eigenvalues ascending;
// each eigenvector sign-fixed so its first coordinate with |x| > 1e-12
// is positive; exact ties in eigenvalue broken by lexicographic
// comparison of the sign-fixed vectors.
inline EigenPairs laplacian_eigenpairs(const Eigen::MatrixXd& L) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("eigendecomposition did not converge");
    const Eigen::Index b = L.rows();
    Eigen::MatrixXd vecs = solver.eigenvectors();
    Eigen::VectorXd vals = solver.eigenvalues();
    for (Eigen::Index k = 0; k < b; ++k) {
        for (Eigen::Index i = 0; i < b; ++i) {
            if (std::abs(vecs(i, k)) > 1e-12) {
                if (vecs(i, k) < 0) vecs.col(k) = -vecs.col(k);
                break;
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(b));
    for (Eigen::Index k = 0; k < b; ++k) order[static_cast<std::size_t>(k)] = k;
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        if (vals(x) != vals(y)) return vals(x) < vals(y);
        for (Eigen::Index i = 0; i < b; ++i) {
            if (vecs(i, x) != vecs(i, y)) return vecs(i, x) < vecs(i, y);
        }
        return false;
    });
    EigenPairs out;
    out.values.resize(b);
    out.vectors.resize(b, b);
    for (Eigen::Index k = 0; k < b; ++k) {
        out.values(k) = vals(order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

}  // namespace detail

/// Sum over eigenvalues of max(0, 1 - lambda_k); lies in [0, B].
inline double eigv_score(const SimilarityGraph& g) {
    const auto pairs = detail::laplacian_eigenpairs(g.L);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < pairs.values.size(); ++k)
        sum += std::max(0.0, 1.0 - pairs.values(k));
    return sum;
}

/// trace(B*I - D) / B^2.
inline double deg_score(const SimilarityGraph& g) {
    const auto b = static_cast<double>(g.size());
    return (b * b - g.D.diagonal().sum()) / (b * b);
}

/// Eccentricity: embed each response with its coordinates across the k
/// smallest eigenvectors (k = #{lambda < eig_threshold}, at least 1),
/// center the embeddings, return the L2 norm of the concatenation.
inline double ecc_score(const SimilarityGraph& g, double eig_threshold = 0.9) {
    if (!(eig_threshold > 0.0 && eig_threshold <= 2.0))
        throw InvalidInput("eig_threshold must be in (0, 2]");
    const auto pairs = detail::laplacian_eigenpairs(g.L);
    const Eigen::Index b = g.size();
    Eigen::Index k = 0;
    while (k < b && pairs.values(k) < eig_threshold) ++k;
    if (k == 0) k = 1;
    // rows: responses, cols: the k smallest eigenvectors
    Eigen::MatrixXd emb = pairs.vectors.leftCols(k);
    const Eigen::RowVectorXd centroid = emb.colwise().mean();
    emb.rowwise() -= centroid;
    return emb.norm();
}

}  // namespace rague
