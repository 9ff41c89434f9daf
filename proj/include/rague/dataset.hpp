#pragma once

// Line-delimited dataset files: a JSON header line followed by one
// QueryRecord JSON object per line. Logprobs are converted to natural
// log on load according to the header's logprob_base.

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rague/core.hpp"

namespace rague {

enum class LogprobBase { E, Two, Ten };

struct DatasetHeader {
    int schema_version = 1;
    LogprobBase logprob_base = LogprobBase::E;
    std::string notes;
};

inline constexpr int kSupportedSchemaVersion = 1;

inline void to_json(nlohmann::json& j, const DatasetHeader& h) {
    const char* base = h.logprob_base == LogprobBase::E     ? "e"
                       : h.logprob_base == LogprobBase::Two ? "2"
                                                            : "10";
    j = nlohmann::json{{"schema_version", h.schema_version},
                       {"logprob_base", base},
                       {"notes", h.notes}};
}

inline void from_json(const nlohmann::json& j, DatasetHeader& h) {
    j.at("schema_version").get_to(h.schema_version);
    const std::string base = j.value("logprob_base", "e");
    if (base == "e")
        h.logprob_base = LogprobBase::E;
    else if (base == "2")
        h.logprob_base = LogprobBase::Two;
    else if (base == "10")
        h.logprob_base = LogprobBase::Ten;
    else
        throw ParseError("unknown logprob_base '" + base + "'");
    h.notes = j.value("notes", "");
}

namespace detail {

inline void rescale_logprobs(TokenizedResponse& r, double factor) {
    for (double& lp : r.logprobs) lp *= factor;
}

inline void rescale_bundle(GenerationBundle& b, double factor) {
    rescale_logprobs(b.most_likely, factor);
    for (auto& s : b.samples) rescale_logprobs(s, factor);
}

}  // namespace detail

struct Dataset {
    DatasetHeader header;
    std::vector<QueryRecord> records;
};

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open dataset file: " + path);
    Dataset ds;
    std::string line;
    long line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty dataset file", 1);
    ++line_no;
    try {
        ds.header = nlohmann::json::parse(line).get<DatasetHeader>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad header: ") + e.what(), line_no);
    }
    if (ds.header.schema_version != kSupportedSchemaVersion)
        throw VersionError("unsupported schema_version " +
                           std::to_string(ds.header.schema_version));

    const double factor = ds.header.logprob_base == LogprobBase::E     ? 1.0
                          : ds.header.logprob_base == LogprobBase::Two ? std::log(2.0)
                                                                       : std::log(10.0);
    std::set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        QueryRecord rec;
        try {
            rec = nlohmann::json::parse(line).get<QueryRecord>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad record: ") + e.what(), line_no);
        }
        if (factor != 1.0) {
            detail::rescale_bundle(rec.no_rag, factor);
            if (rec.rag) detail::rescale_bundle(*rec.rag, factor);
        }
        const auto violations = validate_record(rec);
        if (!violations.empty())
            throw ParseError("invalid record '" + rec.id + "': " + violations.front(),
                             line_no);
        if (!seen_ids.insert(rec.id).second)
            throw ParseError("duplicate record id '" + rec.id + "'", line_no);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

/// Always writes natural-log logprobs with a base-"e" header.
inline void save_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write dataset file: " + path);
    DatasetHeader header = ds.header;
    header.logprob_base = LogprobBase::E;
    out << nlohmann::json(header).dump() << '\n';
    for (const auto& rec : ds.records) out << nlohmann::json(rec).dump() << '\n';
}

}  // namespace rague
