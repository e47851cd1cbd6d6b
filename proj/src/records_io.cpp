#include "fedseg/records_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedseg/errors.hpp"

namespace fedseg {

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void check_id(const std::string& id, const char* what) {
    if (id.empty()) throw ValidationError(std::string(what) + " must not be empty");
    if (id.find_first_of(",;|\n\r") != std::string::npos)
        throw ValidationError(std::string(what) + " '" + id + "' contains a reserved character (,;|)");
}

// shortest representation that round-trips the double exactly
std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ";") + id;
    return out;
}

}  // namespace

void write_manifest_csv(const std::filesystem::path& path, std::span<const ManifestRow> rows) {
    auto out = open_out(path);
    out << "case,institution,split\n";
    for (const auto& row : rows) {
        check_id(row.case_id, "case id");
        check_id(row.institution, "institution id");
        if (row.split != "train" && row.split != "val")
            throw ValidationError("split must be train or val, got '" + row.split + "'");
        out << row.case_id << ',' << row.institution << ',' << row.split << '\n';
    }
}

std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines.front() != "case,institution,split")
        throw FormatError(path.string() + ": expected manifest header 'case,institution,split'");
    std::vector<ManifestRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_line(lines[i], ',');
        if (fields.size() != 3)
            throw FormatError(path.string() + ": line " + std::to_string(i + 1) + " has " +
                              std::to_string(fields.size()) + " fields, expected 3");
        if (fields[2] != "train" && fields[2] != "val")
            throw FormatError(path.string() + ": line " + std::to_string(i + 1) + ": unknown split '" + fields[2] +
                              "'");
        rows.push_back(ManifestRow{fields[0], fields[1], fields[2]});
    }
    return rows;
}

void write_metric_records_csv(const std::filesystem::path& path, std::span<const MetricRecord> records) {
    auto out = open_out(path);
    out << "algorithm,institution,case,region,metric,value,missing\n";
    for (const auto& r : records) {
        check_id(r.algorithm, "algorithm id");
        check_id(r.institution, "institution id");
        check_id(r.case_id, "case id");
        out << r.algorithm << ',' << r.institution << ',' << r.case_id << ',' << to_string(r.region) << ','
            << to_string(r.metric) << ',' << (r.missing ? "" : format_double(r.value)) << ','
            << (r.missing ? 1 : 0) << '\n';
    }
}

std::vector<MetricRecord> read_metric_records_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines.front() != "algorithm,institution,case,region,metric,value,missing")
        throw FormatError(path.string() + ": expected metric record header");
    std::vector<MetricRecord> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_line(lines[i], ',');
        if (fields.size() != 7)
            throw FormatError(path.string() + ": line " + std::to_string(i + 1) + " has " +
                              std::to_string(fields.size()) + " fields, expected 7");
        MetricRecord r;
        r.algorithm = fields[0];
        r.institution = fields[1];
        r.case_id = fields[2];
        r.region = region_from_string(fields[3]);
        r.metric = metric_from_string(fields[4]);
        r.missing = fields[6] == "1";
        if (!r.missing) {
            try {
                r.value = std::stod(fields[5]);
            } catch (const std::exception&) {
                throw FormatError(path.string() + ": line " + std::to_string(i + 1) + ": bad value '" + fields[5] +
                                  "'");
            }
        } else if (!fields[5].empty()) {
            throw FormatError(path.string() + ": line " + std::to_string(i + 1) +
                              ": missing-flagged row must have an empty value");
        }
        records.push_back(std::move(r));
    }
    return records;
}

void write_ledger_csv(const std::filesystem::path& path, const CommLedger& ledger) {
    auto out = open_out(path);
    out << "round,n_selected,n_responded,bytes_down,bytes_up,consensus_val_score,selected,responded\n";
    for (const auto& r : ledger.records) {
        out << r.round_index << ',' << r.selected.size() << ',' << r.responded.size() << ',' << r.bytes_down << ','
            << r.bytes_up << ',' << format_double(r.consensus_val_score) << ',' << join_ids(r.selected) << ','
            << join_ids(r.responded) << '\n';
    }
}

nlohmann::json history_report(const FederationResult& result, const FederationConfig& config) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : result.ledger.records) {
        rounds.push_back({
            {"round", r.round_index},
            {"selected", r.selected},
            {"responded", r.responded},
            {"bytes_down", r.bytes_down},
            {"bytes_up", r.bytes_up},
            {"consensus_val_score", r.consensus_val_score},
        });
    }
    const CostReport cost = communication_cost(result.ledger);
    return nlohmann::json{
        {"rounds", std::move(rounds)},
        {"totals",
         {{"bytes_down", result.ledger.total_bytes_down()},
          {"bytes_up", result.ledger.total_bytes_up()},
          {"cumulative_bytes", result.ledger.cumulative_bytes()}}},
        {"cost",
         {{"rounds", cost.rounds},
          {"cumulative_bytes", cost.cumulative_bytes},
          {"mean_bytes_per_round", cost.mean_bytes_per_round},
          {"product_metric", cost.product_metric}}},
        {"best_round", result.best_round},
        {"param_count", result.final_model.values.size()},
        {"config",
         {{"rounds", config.rounds},
          {"seed", config.seed},
          {"wire_width", config.wire_width},
          {"metadata_bytes", config.metadata_bytes},
          {"epochs", config.epochs},
          {"lr", config.lr}}},
    };
}

nlohmann::json rank_report(const RankTable& table, std::span<const MetricRecord> records) {
    nlohmann::json stats = nlohmann::json::object();
    for (const auto& alg : table.algorithms) {
        nlohmann::json per_metric = nlohmann::json::object();
        for (const MetricKind metric : {MetricKind::DSC, MetricKind::HD95}) {
            nlohmann::json per_region = nlohmann::json::object();
            for (const Region region : kAllRegions) {
                const double mean = mean_performance(records, alg, metric, region);
                const auto [worst_inst, worst_value] = worst_case_performance(records, alg, metric, region);
                per_region[to_string(region)] = {
                    {"mean", mean}, {"worst_institution", worst_inst}, {"worst_value", worst_value}};
            }
            per_metric[to_string(metric)] = std::move(per_region);
        }
        stats[alg] = std::move(per_metric);
    }

    nlohmann::json per_inst = nlohmann::json::object();
    for (const auto& [alg, by_inst] : table.per_institution) per_inst[alg] = by_inst;

    return nlohmann::json{
        {"algorithms", table.algorithms}, {"institutions", table.institutions},
        {"per_institution_ranks", std::move(per_inst)}, {"mean_ranks", table.mean_rank},
        {"final_ranks", table.final_rank}, {"statistics", std::move(stats)},
    };
}

void write_rank_table_csv(const std::filesystem::path& path, const RankTable& table) {
    auto out = open_out(path);
    out << "algorithm";
    for (const auto& inst : table.institutions) out << ',' << inst;
    out << ",mean_rank,final_rank\n";
    for (const auto& alg : table.algorithms) {
        out << alg;
        for (const auto& inst : table.institutions) out << ',' << format_double(table.per_institution.at(alg).at(inst));
        out << ',' << format_double(table.mean_rank.at(alg)) << ',' << table.final_rank.at(alg) << '\n';
    }
}

}  // namespace fedseg
