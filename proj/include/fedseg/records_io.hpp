#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fedseg/federation.hpp"
#include "fedseg/ranking.hpp"

namespace fedseg {

// manifest.csv: one generated case per row
struct ManifestRow {
    std::string case_id;
    std::string institution;
    std::string split;  // "train" or "val"
};

void write_manifest_csv(const std::filesystem::path& path, std::span<const ManifestRow> rows);
std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path);

// metric record CSV, header: algorithm,institution,case,region,metric,value,missing
void write_metric_records_csv(const std::filesystem::path& path, std::span<const MetricRecord> records);
std::vector<MetricRecord> read_metric_records_csv(const std::filesystem::path& path);

// ledger CSV, one row per round
void write_ledger_csv(const std::filesystem::path& path, const CommLedger& ledger);

// structured run report: per-round records, totals, both cost readings
nlohmann::json history_report(const FederationResult& result, const FederationConfig& config);

nlohmann::json rank_report(const RankTable& table, std::span<const MetricRecord> records);
void write_rank_table_csv(const std::filesystem::path& path, const RankTable& table);

}  // namespace fedseg
