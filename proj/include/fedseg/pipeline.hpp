#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedseg/federation.hpp"
#include "fedseg/records_io.hpp"
#include "fedseg/synthetic.hpp"

namespace fedseg {

// Dataset directory layout produced by gen-data and consumed everywhere
// else: <root>/manifest.csv, <root>/images/<case>.nii,
// <root>/labels/<case>.nii.

struct GenDataConfig {
    std::uint64_t seed = 0;
    std::vector<InstitutionSpec> institutions;  // seeds derived from the top-level seed
};

GenDataConfig parse_gen_config(const nlohmann::json& config);
std::vector<ManifestRow> run_gen_data(const GenDataConfig& config, const std::filesystem::path& out_dir);

struct SimulateConfig {
    FederationConfig fed;
    std::filesystem::path manifest;
    std::string trainer_name = "reference";
    nlohmann::json trainer_params;
    std::string strategy_name = "fedavg";
    nlohmann::json strategy_params;
    OutageModel outage;
};

// `base_dir` anchors relative paths in the config file.
SimulateConfig parse_simulate_config(const nlohmann::json& config, const std::filesystem::path& base_dir);

// Loads the manifest into per-institution collaborators (institutions in
// first-appearance order, cases in file order).
std::vector<Collaborator> load_collaborators(const std::filesystem::path& manifest_path);

// Runs the federation and writes model.bin, ledger.csv and history.json
// into out_dir.
FederationResult run_simulate(const SimulateConfig& config, const std::filesystem::path& out_dir);

// Predicts labels for manifest cases with a saved model; writes
// <out_dir>/<case>.nii. `split` filters to "train"/"val"/"all".
void run_predict(const std::filesystem::path& model_path, const std::filesystem::path& manifest_path,
                 const std::string& trainer_name, const nlohmann::json& trainer_params, const std::string& split,
                 const std::filesystem::path& out_dir);

// Scores every ground-truth case against the same-named prediction file;
// absent predictions yield missing-flagged rows. Institutions come from the
// manifest when given, otherwise a single "all" institution.
std::vector<MetricRecord> run_evaluate(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                                       const std::optional<std::filesystem::path>& manifest_path,
                                       const std::string& algorithm, const std::filesystem::path& out_csv);

// Merges metric CSVs (>= 2 algorithms), writes ranks.csv and report.json.
RankTable run_rank(const std::vector<std::filesystem::path>& metric_csvs, const std::filesystem::path& out_dir);

}  // namespace fedseg
