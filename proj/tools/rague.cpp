// Pipeline driver: score / axioms / calibrate / eval / generate over
// line-delimited record files, against live scorer endpoints or the
// offline fixture scorers.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "rague/rague.hpp"

namespace {

using namespace rague;

struct ScorerOptions {
    std::string nli_endpoint;
    std::string nli_fixture_file;
    bool nli_hash = false;
    std::string grounding_endpoint;
    bool grounding_hash = false;
    std::string cache_dir;
    std::string auth_env = "RAGUE_API_TOKEN";
};

struct Scorers {
    std::unique_ptr<NliScorer> nli_impl;
    std::unique_ptr<GroundingScorer> grounding_impl;
    std::unique_ptr<ScoreCache> cache;
    std::unique_ptr<NliScorer> nli_cached;
    std::unique_ptr<GroundingScorer> grounding_cached;

    NliScorer& nli() { return nli_cached ? *nli_cached : *nli_impl; }
    GroundingScorer* grounding() {
        if (grounding_cached) return grounding_cached.get();
        return grounding_impl.get();
    }
};

std::unique_ptr<FixtureNli> load_nli_fixture(const std::string& path) {
    auto fx = std::make_unique<FixtureNli>();
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open NLI fixture file: " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad NLI fixture line: ") + e.what(), line_no);
        }
        fx->add(j.at("premise"), j.at("hypothesis"),
                {j.at("entailment"), j.at("neutral"), j.at("contradiction")});
    }
    return fx;
}

Scorers build_scorers(const ScorerOptions& opt) {
    Scorers s;
    if (!opt.nli_fixture_file.empty()) {
        s.nli_impl = load_nli_fixture(opt.nli_fixture_file);
    } else if (opt.nli_hash) {
        s.nli_impl = std::make_unique<HashNli>();
    } else if (!opt.nli_endpoint.empty()) {
        ClientConfig cfg;
        cfg.endpoint = opt.nli_endpoint;
        cfg.auth_token_env = opt.auth_env;
        s.nli_impl = std::make_unique<HttpNliScorer>(cfg);
    } else {
        throw InvalidInput("no NLI scorer configured "
                           "(--nli-endpoint, --nli-fixture, or --nli-hash-fixture)");
    }
    if (!opt.grounding_endpoint.empty()) {
        ClientConfig cfg;
        cfg.endpoint = opt.grounding_endpoint;
        cfg.auth_token_env = opt.auth_env;
        s.grounding_impl = std::make_unique<HttpGroundingScorer>(cfg);
    } else if (opt.grounding_hash) {
        s.grounding_impl = std::make_unique<HashGrounding>();
    }
    if (!opt.cache_dir.empty()) {
        s.cache = std::make_unique<ScoreCache>(opt.cache_dir);
        s.nli_cached = std::make_unique<CachingNli>(*s.nli_impl, *s.cache);
        if (s.grounding_impl)
            s.grounding_cached =
                std::make_unique<CachingGrounding>(*s.grounding_impl, *s.cache);
    }
    return s;
}

std::vector<Method> parse_methods(const std::string& csv) {
    std::vector<Method> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(method_from_string(item));
    }
    if (out.empty()) throw InvalidInput("no methods given");
    return out;
}

RelationBackendKind parse_backend(const std::string& s) {
    if (s == "cti") return RelationBackendKind::Cti;
    if (s == "nli") return RelationBackendKind::Nli;
    if (s == "grounding") return RelationBackendKind::Grounding;
    throw InvalidInput("unknown relation backend: " + s);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

struct CommonArgs {
    std::string dataset_path;
    std::string methods_csv = "pe,se,eigv,deg,ecc";
    std::string backend = "nli";
    std::string instantiation = "ref";
    std::string out_dir = ".";
    double ecc_threshold = 0.9;
    double cti_tau = 0.1;
    int cti_top_k = 20;
    int workers = 1;
    unsigned seed = 0;  // affects nothing once caches are complete
    ScorerOptions scorers;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_dataset = true) {
    auto* d = cmd->add_option("--dataset", a.dataset_path, "record file (line-delimited)");
    if (needs_dataset) d->required();
    cmd->add_option("--methods", a.methods_csv, "comma list: pe,se,pe_m,se_m,eigv,deg,ecc,numset");
    cmd->add_option("--relation-backend", a.backend, "cti|nli|grounding");
    cmd->add_option("--instantiation", a.instantiation, "ref|ref-free");
    cmd->add_option("--out-dir", a.out_dir, "output directory");
    cmd->add_option("--ecc-threshold", a.ecc_threshold, "ECC eigenvalue threshold");
    cmd->add_option("--cti-tau", a.cti_tau, "CTI KL threshold (nats)");
    cmd->add_option("--cti-top-k", a.cti_top_k, "CTI top-k vocab restriction");
    cmd->add_option("--workers", a.workers, "worker limit");
    cmd->add_option("--seed", a.seed, "unused when caches are complete; documents determinism");
    cmd->add_option("--nli-endpoint", a.scorers.nli_endpoint, "NLI service URL");
    cmd->add_option("--nli-fixture", a.scorers.nli_fixture_file, "offline NLI fixture table (jsonl)");
    cmd->add_flag("--nli-hash-fixture", a.scorers.nli_hash, "deterministic procedural NLI fixture");
    cmd->add_option("--grounding-endpoint", a.scorers.grounding_endpoint, "grounding service URL");
    cmd->add_flag("--grounding-hash-fixture", a.scorers.grounding_hash, "procedural grounding fixture");
    cmd->add_option("--cache-dir", a.scorers.cache_dir, "score cache directory");
    cmd->add_option("--auth-env", a.scorers.auth_env, "env var holding the bearer token");
}

std::string hash_of(const CommonArgs& a) {
    std::ostringstream os;
    os << a.dataset_path << '|' << a.methods_csv << '|' << a.backend << '|'
       << a.instantiation << '|' << a.ecc_threshold << '|' << a.cti_tau << '|'
       << a.cti_top_k;
    return config_hash(os.str());
}

ScoringConfig scoring_config(const CommonArgs& a) {
    ScoringConfig cfg;
    cfg.methods = parse_methods(a.methods_csv);
    cfg.ecc_threshold = a.ecc_threshold;
    return cfg;
}

void write_score_csv(const std::string& path, const ScoreTable& table,
                     const std::string& cfg_hash) {
    std::ofstream out(path);
    out << "# config_hash=" << cfg_hash << '\n';
    out << "record_id,method,condition,calibrated,value\n";
    for (const auto& r : table.rows)
        out << r.record_id << ',' << to_string(r.method) << ','
            << to_string(r.condition) << ',' << (r.calibrated ? 1 : 0) << ','
            << fmt(r.value) << '\n';
}

int cmd_score(const CommonArgs& a) {
    auto ds = load_dataset(a.dataset_path);
    Scorers scorers = build_scorers(a.scorers);
    const ScoreTable table = score_records(ds.records, scoring_config(a), scorers.nli());
    std::filesystem::create_directories(a.out_dir);
    write_score_csv(a.out_dir + "/scores.csv", table, hash_of(a));
    std::cout << "wrote " << table.rows.size() << " score rows to " << a.out_dir
              << "/scores.csv\n";
    return 0;
}

int cmd_axioms(const CommonArgs& a, bool strict_paper_a4) {
    auto ds = load_dataset(a.dataset_path);
    Scorers scorers = build_scorers(a.scorers);
    NliScorer& nli = scorers.nli();
    const ScoreTable table = score_records(ds.records, scoring_config(a), nli);
    const bool ref_free = a.instantiation == "ref-free";
    NliRelationProvider provider(nli);

    std::vector<std::pair<std::string, AxiomLabel>> labels;
    for (const auto& rec : ds.records) {
        if (!rec.rag) continue;
        AxiomLabel label = ref_free
                               ? classify_reference_free(rec, provider, strict_paper_a4)
                               : classify_reference_based(rec);
        labels.emplace_back(rec.id, label);
    }

    std::filesystem::create_directories(a.out_dir);
    std::ofstream csv(a.out_dir + "/axioms.csv");
    std::ofstream md(a.out_dir + "/axioms.md");
    const std::string cfg_hash = hash_of(a);
    csv << "# config_hash=" << cfg_hash << '\n';
    csv << "method,axiom,n,pass_pct,mean_before,mean_after,wilcoxon_p,significant\n";
    md << "# Axiom report\n\nconfig_hash: " << cfg_hash << "\n\n";
    md << "| method | axiom | n | pass % | mean before | mean after | p | sig |\n";
    md << "|---|---|---|---|---|---|---|---|\n";

    for (Method m : scoring_config(a).methods) {
        std::map<Axiom, std::vector<AxiomCheck>> grouped;
        for (const auto& [id, label] : labels) {
            if (label.axiom == Axiom::None) continue;
            const auto u0 = table.find(id, m, Condition::NoRag);
            const auto u1 = table.find(id, m, Condition::Rag);
            if (!u0 || !u1) continue;
            grouped[label.axiom].push_back(check_sample(label, *u0, *u1));
        }
        for (const auto& [axiom, checks] : grouped) {
            const GroupReport rep = group_report(checks);
            csv << to_string(m) << ',' << to_string(axiom) << ',' << rep.n << ','
                << fmt(rep.pass_pct) << ',' << fmt(rep.mean_before) << ','
                << fmt(rep.mean_after) << ',' << fmt(rep.wilcoxon_p) << ','
                << (rep.significant ? 1 : 0) << '\n';
            const char* dir = (axiom == Axiom::A2 || axiom == Axiom::A4) ? "up"
                              : axiom == Axiom::A5                       ? "flat"
                                                                         : "down";
            md << "| " << to_string(m) << " | " << to_string(axiom) << " (" << dir
               << ") | " << rep.n << " | " << fmt(rep.pass_pct) << " | "
               << fmt(rep.mean_before) << " | " << fmt(rep.mean_after) << " | "
               << fmt(rep.wilcoxon_p) << " | " << (rep.significant ? "yes" : "no")
               << " |\n";
        }
    }
    std::cout << "wrote axiom reports to " << a.out_dir << "\n";
    return 0;
}

int cmd_calibrate(const CommonArgs& a, const std::string& paper_defaults,
                  const std::string& coefficients_file, bool fit) {
    auto ds = load_dataset(a.dataset_path);
    Scorers scorers = build_scorers(a.scorers);
    NliScorer& nli = scorers.nli();
    const RelationBackendKind backend = parse_backend(a.backend);
    const Method method = parse_methods(a.methods_csv).front();

    ScoringConfig cfg;
    cfg.methods = {method};
    cfg.ecc_threshold = a.ecc_threshold;
    const ScoreTable table = score_records(ds.records, cfg, nli);
    const CtiConfig cti_cfg{a.cti_top_k, a.cti_tau};

    struct Row {
        std::string id;
        ValidationSample sample;
    };
    std::vector<Row> rows;
    for (const auto& rec : ds.records) {
        if (!rec.rag || !rec.context) continue;
        const auto u0 = table.find(rec.id, method, Condition::NoRag);
        const auto u1 = table.find(rec.id, method, Condition::Rag);
        if (!u0 || !u1) continue;
        const RelationScores rs =
            relation_scores(rec, backend, nli, scorers.grounding(), cti_cfg);
        ValidationSample s;
        s.input = {rs.e_score, rs.r1_score, rs.r2_score, *u1};
        s.axiom = classify_reference_based(rec).axiom;
        s.correct = rec.gold_answers.empty()
                        ? false
                        : correctness(rec.rag->most_likely, rec.gold_answers);
        s.u_no_rag = *u0;
        rows.push_back({rec.id, s});
    }

    CalibrationCoefficients k;
    if (!paper_defaults.empty()) {
        k = paper_defaults_for(parse_backend(paper_defaults));
    } else if (!coefficients_file.empty()) {
        std::ifstream in(coefficients_file);
        if (!in) throw InvalidInput("cannot open coefficients file");
        nlohmann::json j;
        in >> j;
        k = {j.at("k1"), j.at("k2"), j.at("k3"), j.at("k4"), CoeffSource::Fitted};
    } else if (fit) {
        std::vector<ValidationSample> validation;
        for (const auto& r : rows) validation.push_back(r.sample);
        k = fit_coefficients(validation);
    } else {
        throw InvalidInput("choose --fit, --paper-defaults, or --coefficients");
    }

    std::filesystem::create_directories(a.out_dir);
    const std::string cfg_hash = hash_of(a);
    {
        const char* src = k.source == CoeffSource::PaperDefaultCTI   ? "paper_default_cti"
                          : k.source == CoeffSource::PaperDefaultNLI ? "paper_default_nli"
                                                                     : "fitted";
        std::ofstream out(a.out_dir + "/coefficients.json");
        out << nlohmann::json{{"k1", k.k1}, {"k2", k.k2}, {"k3", k.k3}, {"k4", k.k4},
                              {"source", src}, {"config_hash", cfg_hash}}
                   .dump(2)
            << '\n';
    }
    {
        std::ofstream out(a.out_dir + "/calibrated_scores.csv");
        out << "# config_hash=" << cfg_hash << '\n';
        out << "record_id,method,value_uncalibrated,value_calibrated\n";
        for (const auto& r : rows)
            out << r.id << ',' << to_string(method) << ','
                << fmt(r.sample.input.u_rag) << ','
                << fmt(calibrate(r.sample.input, k)) << '\n';
    }
    std::cout << "wrote coefficients (" << fmt(k.k1) << ", " << fmt(k.k2) << ", "
              << fmt(k.k3) << ", " << fmt(k.k4) << ") and calibrated scores to "
              << a.out_dir << "\n";
    return 0;
}

int cmd_eval(const CommonArgs& a) {
    auto ds = load_dataset(a.dataset_path);
    Scorers scorers = build_scorers(a.scorers);
    const ScoringConfig cfg = scoring_config(a);
    const ScoreTable table = score_records(ds.records, cfg, scorers.nli());

    std::filesystem::create_directories(a.out_dir);
    const std::string cfg_hash = hash_of(a);
    std::ofstream csv(a.out_dir + "/eval.csv");
    std::ofstream md(a.out_dir + "/eval.md");
    csv << "# config_hash=" << cfg_hash << '\n';
    csv << "method,condition,accuracy,auroc\n";
    md << "# Evaluation\n\nconfig_hash: " << cfg_hash << "\n\n";
    md << "| method | condition | accuracy | AUROC |\n|---|---|---|---|\n";

    for (Condition cond : {Condition::NoRag, Condition::Rag}) {
        double acc;
        try {
            acc = accuracy(ds.records, cond);
        } catch (const EmptyInput&) {
            continue;
        }
        for (Method m : cfg.methods) {
            std::vector<LabeledScore> labeled;
            for (const auto& rec : ds.records) {
                const GenerationBundle* b = cond == Condition::NoRag
                                                ? &rec.no_rag
                                                : (rec.rag ? &*rec.rag : nullptr);
                if (!b || rec.gold_answers.empty()) continue;
                const auto u = table.find(rec.id, m, cond);
                if (!u) continue;
                labeled.push_back({*u, correctness(b->most_likely, rec.gold_answers)});
            }
            double auc = std::numeric_limits<double>::quiet_NaN();
            try {
                auc = auroc(labeled);
            } catch (const Undefined&) {
            }
            csv << to_string(m) << ',' << to_string(cond) << ',' << fmt(acc) << ','
                << fmt(auc) << '\n';
            md << "| " << to_string(m) << " | " << to_string(cond) << " | "
               << fmt(acc) << " | " << fmt(auc) << " |\n";
        }
    }
    std::cout << "wrote eval reports to " << a.out_dir << "\n";
    return 0;
}

int cmd_generate(const CommonArgs& a, const std::string& questions_file,
                 const std::string& gen_endpoint, int num_samples, double temperature,
                 int max_tokens, const std::string& out_file) {
    ClientConfig ccfg;
    ccfg.endpoint = gen_endpoint;
    ccfg.auth_token_env = a.scorers.auth_env;
    HttpCompletionBackend backend(ccfg);

    // questions file: one JSON object per line with id, question,
    // gold_answers, optional context {doc_id, text, relevance}
    std::ifstream in(questions_file);
    if (!in) throw InvalidInput("cannot open questions file: " + questions_file);
    Dataset ds;
    ds.header.notes = "generated";
    GenerationConfig gcfg{num_samples, temperature, max_tokens};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        QueryRecord rec;
        rec.id = j.at("id");
        rec.question = j.at("question");
        rec.gold_answers = j.value("gold_answers", std::vector<std::string>{});
        if (j.contains("context")) rec.context = j.at("context").get<ContextRecord>();
        rec.no_rag = generate_bundle(backend, rec.question, std::nullopt, gcfg);
        if (rec.context)
            rec.rag = generate_bundle(backend, rec.question, rec.context->text, gcfg);
        ds.records.push_back(std::move(rec));
    }
    save_dataset(out_file, ds);
    std::cout << "wrote " << ds.records.size() << " records to " << out_file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uncertainty estimation and axiomatic calibration for RAG records"};
    app.require_subcommand(1);

    CommonArgs args;
    bool strict_paper_a4 = false;
    std::string paper_defaults, coefficients_file;
    bool fit = false;
    std::string questions_file, gen_endpoint, gen_out = "generated.jsonl";
    int gen_samples = 10, gen_max_tokens = 64;
    double gen_temperature = 1.0;

    auto* score = app.add_subcommand("score", "compute uncertainty scores per record");
    add_common(score, args);

    auto* axioms = app.add_subcommand("axioms", "classify axioms and check directions");
    add_common(axioms, args);
    axioms->add_flag("--strict-paper-a4", strict_paper_a4,
                     "keep the printed reference-free A4 condition (labels such samples none)");

    auto* calibrate = app.add_subcommand("calibrate", "fit or apply calibration coefficients");
    add_common(calibrate, args);
    calibrate->add_option("--paper-defaults", paper_defaults,
                          "use published coefficients for backend: cti|nli|grounding");
    calibrate->add_option("--coefficients", coefficients_file, "coefficients JSON file");
    calibrate->add_flag("--fit", fit, "grid-search coefficients on this dataset");

    auto* eval = app.add_subcommand("eval", "accuracy + AUROC per method/condition");
    add_common(eval, args);

    auto* generate = app.add_subcommand("generate", "populate a record file from a generation service");
    add_common(generate, args, /*needs_dataset=*/false);
    generate->add_option("--questions", questions_file, "questions jsonl file")->required();
    generate->add_option("--gen-endpoint", gen_endpoint, "generation service URL")->required();
    generate->add_option("--num-samples", gen_samples, "sampled responses per query (B)");
    generate->add_option("--temperature", gen_temperature, "sampling temperature");
    generate->add_option("--max-tokens", gen_max_tokens, "max tokens per response");
    generate->add_option("--out", gen_out, "output record file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) return cmd_score(args);
        if (axioms->parsed()) return cmd_axioms(args, strict_paper_a4);
        if (calibrate->parsed())
            return cmd_calibrate(args, paper_defaults, coefficients_file, fit);
        if (eval->parsed()) return cmd_eval(args);
        if (generate->parsed())
            return cmd_generate(args, questions_file, gen_endpoint, gen_samples,
                                gen_temperature, gen_max_tokens, gen_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
