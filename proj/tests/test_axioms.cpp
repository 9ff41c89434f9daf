#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "rague/axioms.hpp"

using namespace rague;
using Catch::Matchers::WithinAbs;

namespace {

TokenizedResponse resp(std::string text) {
    TokenizedResponse r;
    r.text = std::move(text);
    r.tokens = {"t"};
    r.logprobs = {-1.0};
    return r;
}

QueryRecord paired(const std::string& r1, const std::string& r2,
                   std::vector<std::string> gold,
                   RelevanceFlag rel = RelevanceFlag::Relevant) {
    QueryRecord rec;
    rec.id = "q";
    rec.question = "What is the name of Manchester United's stadium?";
    rec.gold_answers = std::move(gold);
    rec.no_rag.most_likely = resp(r1);
    rec.context = ContextRecord{"d", "ctx", rel};
    rec.rag = GenerationBundle{};
    rec.rag->most_likely = resp(r2);
    rec.rag->condition = Condition::Rag;
    return rec;
}

// Fixture relation provider driven by a per-response class table.
class TableRelations : public RelationProvider {
public:
    void set(const std::string& r, RelationClass cls) { table_[r] = cls; }
    RelationVerdict relation(const std::string&, const std::string&,
                             const std::string& r) override {
        auto it = table_.find(r);
        if (it == table_.end()) throw ScorerUnavailable("no relation fixture for " + r);
        return {it->second, it->second == RelationClass::Entailment ? 0.9 : 0.05};
    }

private:
    std::map<std::string, RelationClass> table_;
};

}  // namespace

TEST_CASE("reference-based classification covers the four scenario rows") {
    // consistent + correct
    CHECK(classify_reference_based(paired("Old Trafford", "Old Trafford",
                                          {"Old Trafford"}))
              .axiom == Axiom::A1);
    // consistent + incorrect
    CHECK(classify_reference_based(paired("Wembley Stadium", "Wembley Stadium",
                                          {"Old Trafford"}))
              .axiom == Axiom::A2);
    // changed to correct
    CHECK(classify_reference_based(paired("Wembley Stadium", "Old Trafford",
                                          {"Old Trafford"}))
              .axiom == Axiom::A3);
    // changed to incorrect
    CHECK(classify_reference_based(paired("Old Trafford", "Wembley Stadium",
                                          {"Old Trafford"}))
              .axiom == Axiom::A4);
    // changed, neither matches gold
    CHECK(classify_reference_based(paired("Anfield", "Wembley Stadium",
                                          {"Old Trafford"}))
              .axiom == Axiom::None);
}

TEST_CASE("A5 takes priority under an irrelevant context") {
    CHECK(classify_reference_based(paired("Old Trafford", "Old Trafford",
                                          {"Old Trafford"}, RelevanceFlag::Irrelevant))
              .axiom == Axiom::A5);
    // not consistent: falls through to A3/A4/None logic
    CHECK(classify_reference_based(paired("Wembley Stadium", "Old Trafford",
                                          {"Old Trafford"}, RelevanceFlag::Irrelevant))
              .axiom == Axiom::A3);
}

TEST_CASE("reference-based requires a rag bundle") {
    auto rec = paired("a", "b", {"a"});
    rec.rag.reset();
    CHECK_THROWS_AS(classify_reference_based(rec), NotPaired);
}

TEST_CASE("reference-free classification follows the rule table") {
    TableRelations rel;
    rel.set("r-ent", RelationClass::Entailment);
    rel.set("r-con", RelationClass::Contradiction);

    auto rec = paired("r-ent", "r-ent", {});
    CHECK(classify_reference_free(rec, rel).axiom == Axiom::A1);

    rec = paired("r-con", "r-con", {});
    CHECK(classify_reference_free(rec, rel).axiom == Axiom::A2);

    rec = paired("r-con", "r-ent", {});
    CHECK(classify_reference_free(rec, rel).axiom == Axiom::A3);

    rec = paired("r-ent", "r-con", {});
    CHECK(classify_reference_free(rec, rel).axiom == Axiom::A4);

    rec = paired("r-ent", "r-ent2", {});
    rel.set("r-ent2", RelationClass::Entailment);
    CHECK(classify_reference_free(rec, rel).axiom == Axiom::None);

    // strict published A4 text can never fire
    rec = paired("r-ent", "r-con", {});
    CHECK(classify_reference_free(rec, rel, /*strict_paper_a4=*/true).axiom ==
          Axiom::None);

    // A5 mirrors the reference-based setup
    rec = paired("r-ent", "r-ent", {}, RelevanceFlag::Irrelevant);
    CHECK(classify_reference_free(rec, rel).axiom == Axiom::A5);
}

TEST_CASE("exhaustive reference-free rule table over (E, R1, R2)") {
    // oracle: direct transcription of the rule table
    auto expected = [](bool eq, RelationClass rel1, RelationClass rel2) {
        if (eq)
            return rel2 == RelationClass::Entailment ? Axiom::A1 : Axiom::A2;
        if (rel1 == RelationClass::Contradiction && rel2 == RelationClass::Entailment)
            return Axiom::A3;
        if (rel1 == RelationClass::Entailment && rel2 == RelationClass::Contradiction)
            return Axiom::A4;
        return Axiom::None;
    };

    TableRelations rel;
    rel.set("r-ent", RelationClass::Entailment);
    rel.set("r-con", RelationClass::Contradiction);
    rel.set("r-ent-b", RelationClass::Entailment);
    rel.set("r-con-b", RelationClass::Contradiction);

    const std::vector<std::pair<std::string, RelationClass>> options = {
        {"r-ent", RelationClass::Entailment},
        {"r-con", RelationClass::Contradiction},
        {"r-ent-b", RelationClass::Entailment},
        {"r-con-b", RelationClass::Contradiction},
    };
    for (const auto& [r1, c1] : options) {
        for (const auto& [r2, c2] : options) {
            for (bool strict : {false, true}) {
                auto rec = paired(r1, r2, {});
                const Axiom got = classify_reference_free(rec, rel, strict).axiom;
                Axiom want = expected(r1 == r2, c1, c2);
                if (strict && want == Axiom::A4) want = Axiom::None;
                CHECK(got == want);
            }
        }
    }
}

TEST_CASE("check_sample directions") {
    const AxiomLabel a1{Axiom::A1, Instantiation::ReferenceBased};
    const AxiomLabel a2{Axiom::A2, Instantiation::ReferenceBased};
    const AxiomLabel a5{Axiom::A5, Instantiation::ReferenceBased};

    CHECK(check_sample(a1, 1.29, 0.34).passed);
    CHECK_FALSE(check_sample(a2, 1.0, 0.5).passed);
    CHECK(check_sample(a5, 2.0, 2.0).passed);
    CHECK(check_sample(a5, 2.0, 2.09).passed);      // within 5% relative
    CHECK_FALSE(check_sample(a5, 2.0, 2.5).passed);

    for (const auto& [a3, a4] :
         {std::pair{Axiom::A3, Axiom::A4}, std::pair{Axiom::A1, Axiom::A2}}) {
        // directional duality: A1/A3 pass exactly when A2/A4 fail (u != u')
        for (const auto& [u0, u1] : {std::pair{1.0, 0.4}, std::pair{0.4, 1.0}}) {
            const bool down =
                check_sample({a3, Instantiation::ReferenceBased}, u0, u1).passed;
            const bool up =
                check_sample({a4, Instantiation::ReferenceBased}, u0, u1).passed;
            CHECK(down != up);
        }
    }

    CHECK_THROWS_AS(check_sample({Axiom::None, Instantiation::ReferenceBased}, 1, 2),
                    InvalidInput);
    CHECK_THROWS_AS(check_sample(a1, std::nan(""), 2.0), InvalidScore);
}

TEST_CASE("group_report aggregates and tests significance") {
    std::vector<AxiomCheck> checks;
    for (double u1 : {0.5, 0.4, 0.3})
        checks.push_back(check_sample({Axiom::A1, Instantiation::ReferenceBased}, 1.0, u1));
    const auto rep = group_report(checks);
    CHECK(rep.pass_pct == 100.0);
    CHECK_THAT(rep.mean_before, WithinAbs(1.0, 1e-12));
    CHECK_THAT(rep.mean_after, WithinAbs(0.4, 1e-12));
    CHECK_FALSE(rep.degenerate);

    // n = 6 all-positive deltas: exact p = 0.03125, not significant at 0.01
    std::vector<AxiomCheck> six;
    for (int i = 1; i <= 6; ++i)
        six.push_back(check_sample({Axiom::A2, Instantiation::ReferenceBased}, 1.0,
                                   1.0 + 0.1 * i));
    const auto rep6 = group_report(six);
    CHECK_THAT(rep6.wilcoxon_p, WithinAbs(0.03125, 1e-15));
    CHECK_FALSE(rep6.significant);
    CHECK(rep6.pass_pct == 100.0);

    // all-zero differences: degenerate, p = 1
    std::vector<AxiomCheck> flat;
    for (int i = 0; i < 4; ++i)
        flat.push_back(check_sample({Axiom::A5, Instantiation::ReferenceBased}, 2.0, 2.0));
    const auto repf = group_report(flat);
    CHECK(repf.degenerate);
    CHECK(repf.wilcoxon_p == 1.0);
    CHECK_FALSE(repf.significant);
}

TEST_CASE("group_report aggregation matches hand-computed means") {
    // ten A1 pairs with descending after-values
    std::vector<AxiomCheck> checks;
    double sum_before = 0.0, sum_after = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double u0 = 2.0 + 0.1 * i;
        const double u1 = 0.5 + 0.05 * i;
        sum_before += u0;
        sum_after += u1;
        checks.push_back(check_sample({Axiom::A1, Instantiation::ReferenceBased}, u0, u1));
    }
    const auto rep = group_report(checks);
    CHECK_THAT(rep.mean_before, WithinAbs(sum_before / 10.0, 1e-12));
    CHECK_THAT(rep.mean_after, WithinAbs(sum_after / 10.0, 1e-12));
    CHECK(rep.pass_pct == 100.0);

    // permutation invariance of pass_pct
    std::mt19937 rng(3);
    std::shuffle(checks.begin(), checks.end(), rng);
    CHECK(group_report(checks).pass_pct == rep.pass_pct);
}
