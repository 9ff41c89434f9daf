#include <numeric>
#include <random>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "rague/spectral.hpp"

using namespace rague;
using Catch::Matchers::WithinAbs;

namespace {

// Independent oracle: score the graph straight from the definitions
// using a fresh eigendecomposition of a locally rebuilt Laplacian.
struct OracleScores {
    double eigv, deg, ecc;
};

OracleScores oracle(const Eigen::MatrixXd& a, double threshold = 0.9) {
    const Eigen::Index b = a.rows();
    Eigen::MatrixXd w = (a + a.transpose()) / 2.0;
    for (Eigen::Index i = 0; i < b; ++i) w(i, i) = 1.0;
    Eigen::VectorXd d = w.rowwise().sum();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(b, b);
    for (Eigen::Index i = 0; i < b; ++i)
        for (Eigen::Index j = 0; j < b; ++j)
            lap(i, j) -= w(i, j) / std::sqrt(d(i) * d(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    const Eigen::VectorXd evals = es.eigenvalues();

    OracleScores s{0.0, 0.0, 0.0};
    for (Eigen::Index k = 0; k < b; ++k) s.eigv += std::max(0.0, 1.0 - evals(k));
    s.deg = (static_cast<double>(b * b) - d.sum()) / static_cast<double>(b * b);

    Eigen::Index k = 0;
    while (k < b && evals(k) < threshold) ++k;  // ascending order
    if (k == 0) k = 1;
    Eigen::MatrixXd emb = es.eigenvectors().leftCols(k);
    Eigen::RowVectorXd centroid = emb.colwise().mean();
    emb.rowwise() -= centroid;
    s.ecc = emb.norm();
    return s;
}

Eigen::MatrixXd random_similarity(std::mt19937& rng, int b) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd a(b, b);
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) a(i, j) = i == j ? 1.0 : u(rng);
    return a;
}

}  // namespace

TEST_CASE("build_similarity_graph construction") {
    SECTION("all-ones 3x3") {
        const auto g = build_similarity_graph(Eigen::MatrixXd::Ones(3, 3));
        CHECK(g.W.isApprox(Eigen::MatrixXd::Ones(3, 3)));
        CHECK(g.D.diagonal().isApprox(Eigen::Vector3d::Constant(3.0)));
        const Eigen::MatrixXd expected_l =
            Eigen::MatrixXd::Identity(3, 3) - Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
        CHECK(g.L.isApprox(expected_l, 1e-12));
    }
    SECTION("zero off-diagonal, B=2") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
        const auto g = build_similarity_graph(a);
        CHECK(g.W.isApprox(Eigen::MatrixXd::Identity(2, 2)));
        CHECK(g.D.isApprox(Eigen::MatrixXd::Identity(2, 2)));
        CHECK(g.L.norm() == 0.0);
    }
    SECTION("asymmetric input is averaged") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
        a(0, 1) = 0.4;
        a(1, 0) = 0.6;
        const auto g = build_similarity_graph(a);
        CHECK_THAT(g.W(0, 1), WithinAbs(0.5, 1e-15));
        CHECK_THAT(g.W(1, 0), WithinAbs(0.5, 1e-15));
    }
    SECTION("invalid inputs throw") {
        Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
        bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(build_similarity_graph(bad), InvalidSimilarity);
        CHECK_THROWS_AS(build_similarity_graph(Eigen::MatrixXd::Ones(1, 1)),
                        InvalidSimilarity);
        Eigen::MatrixXd oob = Eigen::MatrixXd::Ones(2, 2) * 1.5;
        CHECK_THROWS_AS(build_similarity_graph(oob), InvalidSimilarity);
    }
}

TEST_CASE("spectral closed forms") {
    for (int b : {2, 5, 10}) {
        const auto full = build_similarity_graph(Eigen::MatrixXd::Ones(b, b));
        CHECK_THAT(eigv_score(full), WithinAbs(1.0, 1e-8));
        CHECK_THAT(deg_score(full), WithinAbs(0.0, 1e-8));
        CHECK_THAT(ecc_score(full), WithinAbs(0.0, 1e-8));

        const auto none = build_similarity_graph(Eigen::MatrixXd::Identity(b, b));
        CHECK_THAT(eigv_score(none), WithinAbs(static_cast<double>(b), 1e-8));
        CHECK_THAT(deg_score(none), WithinAbs((b - 1.0) / b, 1e-8));
    }

    // two disconnected all-ones blocks
    for (int b : {4, 6, 10}) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(b, b);
        a.topLeftCorner(b / 2, b / 2).setOnes();
        a.bottomRightCorner(b / 2, b / 2).setOnes();
        const auto g = build_similarity_graph(a);
        CHECK_THAT(eigv_score(g), WithinAbs(2.0, 1e-8));
        CHECK(ecc_score(g) > 0.0);
    }

    // ECC at W = I, B = 2: canonical basis embedding gives norm 1
    CHECK_THAT(ecc_score(build_similarity_graph(Eigen::MatrixXd::Identity(2, 2))),
               WithinAbs(1.0, 1e-8));
}

TEST_CASE("ECC decreases as cross-block similarity rises") {
    double prev = std::numeric_limits<double>::infinity();
    for (double cross : {0.0, 0.25, 0.5, 0.75, 0.99}) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Constant(6, 6, cross);
        a.topLeftCorner(3, 3).setOnes();
        a.bottomRightCorner(3, 3).setOnes();
        const double e = ecc_score(build_similarity_graph(a));
        CHECK(e <= prev + 1e-9);
        prev = e;
    }
}

TEST_CASE("scores match the independent oracle on random matrices") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> size(2, 8);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::MatrixXd a = random_similarity(rng, size(rng));
        const auto g = build_similarity_graph(a);
        const auto o = oracle(a);
        CHECK_THAT(eigv_score(g), WithinAbs(o.eigv, 1e-8));
        CHECK_THAT(deg_score(g), WithinAbs(o.deg, 1e-8));
        CHECK_THAT(ecc_score(g), WithinAbs(o.ecc, 1e-8));
    }
}

TEST_CASE("spectral invariants") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int b = 2 + static_cast<int>(rng() % 7);
        const Eigen::MatrixXd a = random_similarity(rng, b);
        const auto g = build_similarity_graph(a);

        const double eigv = eigv_score(g);
        CHECK(eigv >= 0.0);
        CHECK(eigv <= static_cast<double>(b) + 1e-12);

        // Laplacian eigenvalue bound
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.L);
        CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-8);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);

        // permutation invariance of all three scores
        std::vector<int> perm(static_cast<std::size_t>(b));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::MatrixXd ap(b, b);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j)
                ap(i, j) = a(perm[static_cast<std::size_t>(i)],
                             perm[static_cast<std::size_t>(j)]);
        const auto gp = build_similarity_graph(ap);
        CHECK_THAT(eigv_score(gp), WithinAbs(eigv, 1e-8));
        CHECK_THAT(deg_score(gp), WithinAbs(deg_score(g), 1e-8));
        CHECK_THAT(ecc_score(gp), WithinAbs(ecc_score(g), 1e-8));
    }
}

TEST_CASE("zero eigenvalue multiplicity equals connected components on 0/1 graphs") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int b = 2 + static_cast<int>(rng() % 7);
        // random block partition into components
        std::vector<int> comp(static_cast<std::size_t>(b));
        const int n_comp = 1 + static_cast<int>(rng() % static_cast<unsigned>(b));
        for (auto& c : comp) c = static_cast<int>(rng() % static_cast<unsigned>(n_comp));
        std::set<int> used(comp.begin(), comp.end());

        Eigen::MatrixXd a(b, b);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j)
                a(i, j) = comp[static_cast<std::size_t>(i)] ==
                                  comp[static_cast<std::size_t>(j)]
                              ? 1.0
                              : 0.0;
        const auto g = build_similarity_graph(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.L);
        int zeros = 0;
        for (Eigen::Index k = 0; k < b; ++k)
            if (std::abs(es.eigenvalues()(k)) < 1e-9) ++zeros;
        CHECK(zeros == static_cast<int>(used.size()));
    }
}

TEST_CASE("deg_score is zero iff all-ones and monotone in similarity") {
    const auto full = build_similarity_graph(Eigen::MatrixXd::Ones(4, 4));
    CHECK(deg_score(full) == 0.0);

    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(4, 4);
    a(0, 1) = a(1, 0) = 0.5;
    double prev = deg_score(build_similarity_graph(a));
    CHECK(prev > 0.0);
    a(0, 1) = a(1, 0) = 0.8;  // raising similarity lowers the score
    CHECK(deg_score(build_similarity_graph(a)) < prev);
}
