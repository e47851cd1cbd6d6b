#include "fedseg/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "fedseg/errors.hpp"
#include "fedseg/metrics.hpp"
#include "fedseg/nifti.hpp"
#include "fedseg/rng.hpp"

namespace fedseg {

namespace {

namespace fs = std::filesystem;

void require(bool cond, const std::string& message) {
    if (!cond) throw ValidationError(message);
}

Dims parse_dims(const nlohmann::json& j) {
    require(j.is_array() && j.size() == 3, "dims must be an array of 3 positive integers");
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

Spacing parse_spacing(const nlohmann::json& j) {
    require(j.is_array() && j.size() == 3, "spacing must be an array of 3 positive numbers");
    return {j[0].get<float>(), j[1].get<float>(), j[2].get<float>()};
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace

GenDataConfig parse_gen_config(const nlohmann::json& config) {
    require(config.is_object(), "gen-data config must be a JSON object");
    require(config.contains("seed"), "gen-data config needs a seed");
    require(config.contains("institutions") && config.at("institutions").is_array() &&
                !config.at("institutions").empty(),
            "gen-data config needs a non-empty institutions array");

    GenDataConfig out;
    out.seed = config.at("seed").get<std::uint64_t>();

    Dims dims{24, 24, 24};
    Spacing spacing{1.0f, 1.0f, 1.0f};
    if (config.contains("dims")) dims = parse_dims(config.at("dims"));
    if (config.contains("spacing")) spacing = parse_spacing(config.at("spacing"));

    TissueAppearance appearance;
    if (config.contains("appearance")) {
        const auto& app = config.at("appearance");
        appearance.background = app.value("background", appearance.background);
        appearance.ncr = app.value("ncr", appearance.ncr);
        appearance.ed = app.value("ed", appearance.ed);
        appearance.et = app.value("et", appearance.et);
    }

    std::set<std::string> seen;
    for (const auto& inst : config.at("institutions")) {
        InstitutionSpec spec;
        require(inst.contains("id"), "institution entry needs an id");
        spec.id = inst.at("id").get<std::string>();
        require(seen.insert(spec.id).second, "duplicate institution id '" + spec.id + "'");
        require(inst.contains("n_cases"), "institution '" + spec.id + "' needs n_cases");
        spec.n_cases = inst.at("n_cases").get<int>();
        spec.intensity_offset = inst.value("intensity_offset", 0.0);
        spec.intensity_noise_sd = inst.value("intensity_noise_sd", 0.0);
        if (inst.contains("blob_radius_range")) {
            const auto& r = inst.at("blob_radius_range");
            require(r.is_array() && r.size() == 2, "blob_radius_range must be [lo, hi]");
            spec.blob_radius_range = {r[0].get<double>(), r[1].get<double>()};
        }
        spec.dims = inst.contains("dims") ? parse_dims(inst.at("dims")) : dims;
        spec.spacing = inst.contains("spacing") ? parse_spacing(inst.at("spacing")) : spacing;
        spec.appearance = appearance;
        spec.seed = inst.contains("seed") ? inst.at("seed").get<std::uint64_t>()
                                          : derive_seed(out.seed, "institution", fnv1a64(spec.id));
        out.institutions.push_back(std::move(spec));
    }
    return out;
}

std::vector<ManifestRow> run_gen_data(const GenDataConfig& config, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    fs::create_directories(out_dir / "labels", ec);
    if (!fs::is_directory(out_dir / "images") || !fs::is_directory(out_dir / "labels"))
        throw FormatError("cannot create output directories under " + out_dir.string());

    std::vector<ManifestRow> rows;
    for (const auto& spec : config.institutions) {
        std::vector<Case> cases = generate_institution(spec);
        const std::size_t first_val = cases.size() - validation_count(cases.size());
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& c = cases[i];
            write_nifti(c.image, out_dir / "images" / (c.id + ".nii"));
            write_nifti(c.labels, out_dir / "labels" / (c.id + ".nii"));
            rows.push_back(ManifestRow{c.id, spec.id, i < first_val ? "train" : "val"});
        }
    }
    write_manifest_csv(out_dir / "manifest.csv", rows);
    return rows;
}

SimulateConfig parse_simulate_config(const nlohmann::json& config, const fs::path& base_dir) {
    require(config.is_object(), "simulate config must be a JSON object");
    require(config.contains("seed"), "simulate config needs a seed");
    require(config.contains("rounds"), "simulate config needs a round count");
    require(config.contains("data") && config.at("data").contains("manifest"),
            "simulate config needs data.manifest");

    SimulateConfig out;
    out.fed.seed = config.at("seed").get<std::uint64_t>();
    out.fed.rounds = config.at("rounds").get<int>();
    out.fed.wire_width = config.value("wire_width", out.fed.wire_width);
    out.fed.metadata_bytes = config.value("metadata_bytes", out.fed.metadata_bytes);
    out.fed.epochs = config.value("epochs", out.fed.epochs);
    out.fed.lr = config.value("lr", out.fed.lr);
    require(out.fed.rounds >= 1, "rounds must be >= 1");

    const fs::path manifest = config.at("data").at("manifest").get<std::string>();
    out.manifest = manifest.is_absolute() ? manifest : base_dir / manifest;

    if (config.contains("trainer")) {
        const auto& t = config.at("trainer");
        out.trainer_name = t.value("name", out.trainer_name);
        out.trainer_params = t.value("params", nlohmann::json::object());
    } else {
        out.trainer_params = nlohmann::json::object();
    }
    if (config.contains("strategy")) {
        const auto& s = config.at("strategy");
        out.strategy_name = s.value("name", out.strategy_name);
        out.strategy_params = s.value("params", nlohmann::json::object());
    } else {
        out.strategy_params = nlohmann::json::object();
    }
    out.outage = parse_outage_model(config.contains("outage") ? config.at("outage") : nlohmann::json());
    return out;
}

std::vector<Collaborator> load_collaborators(const fs::path& manifest_path) {
    const auto rows = read_manifest_csv(manifest_path);
    if (rows.empty()) throw ValidationError(manifest_path.string() + " lists no cases");
    const fs::path root = manifest_path.parent_path();

    std::vector<Collaborator> collaborators;
    std::map<std::string, std::size_t> index_of;
    for (const auto& row : rows) {
        if (!index_of.count(row.institution)) {
            index_of[row.institution] = collaborators.size();
            collaborators.push_back(Collaborator{row.institution, {}, {}});
        }
        Case c{row.case_id, read_intensity_volume(root / "images" / (row.case_id + ".nii")),
               read_label_volume(root / "labels" / (row.case_id + ".nii"))};
        auto& collab = collaborators[index_of[row.institution]];
        (row.split == "train" ? collab.train_set : collab.val_set).push_back(std::move(c));
    }
    for (const auto& collab : collaborators) {
        if (collab.train_set.empty())
            throw ValidationError("institution '" + collab.id + "' has no training cases in the manifest");
        if (collab.val_set.empty())
            throw ValidationError("institution '" + collab.id + "' has no validation cases in the manifest");
    }
    return collaborators;
}

FederationResult run_simulate(const SimulateConfig& config, const fs::path& out_dir) {
    const std::vector<Collaborator> collaborators = load_collaborators(config.manifest);
    const auto trainer = make_trainer(config.trainer_name, config.trainer_params);
    const auto strategy = make_strategy(config.strategy_name, config.strategy_params);

    FederationResult result = run_federation(config.fed, collaborators, config.outage, *trainer, *strategy);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    save_model(result.final_model, out_dir / "model.bin");
    write_ledger_csv(out_dir / "ledger.csv", result.ledger);
    write_json_file(out_dir / "history.json", history_report(result, config.fed));
    return result;
}

void run_predict(const fs::path& model_path, const fs::path& manifest_path, const std::string& trainer_name,
                 const nlohmann::json& trainer_params, const std::string& split, const fs::path& out_dir) {
    if (split != "all" && split != "train" && split != "val")
        throw ValidationError("split must be all, train or val, got '" + split + "'");
    const ModelParams params = load_model(model_path);
    const auto trainer = make_trainer(trainer_name, trainer_params);
    const auto rows = read_manifest_csv(manifest_path);
    const fs::path root = manifest_path.parent_path();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    for (const auto& row : rows) {
        if (split != "all" && row.split != split) continue;
        const IntensityVolume image = read_intensity_volume(root / "images" / (row.case_id + ".nii"));
        write_nifti(trainer->predict(params, image), out_dir / (row.case_id + ".nii"));
    }
}

std::vector<MetricRecord> run_evaluate(const fs::path& pred_dir, const fs::path& gt_dir,
                                       const std::optional<fs::path>& manifest_path, const std::string& algorithm,
                                       const fs::path& out_csv) {
    if (!fs::is_directory(gt_dir)) throw ValidationError(gt_dir.string() + " is not a directory");
    if (!fs::is_directory(pred_dir)) throw ValidationError(pred_dir.string() + " is not a directory");

    std::map<std::string, std::string> institution_of;
    if (manifest_path) {
        for (const auto& row : read_manifest_csv(*manifest_path)) institution_of[row.case_id] = row.institution;
    }

    std::vector<std::string> case_ids;
    for (const auto& entry : fs::directory_iterator(gt_dir)) {
        if (entry.path().extension() == ".nii") case_ids.push_back(entry.path().stem().string());
    }
    if (case_ids.empty()) throw ValidationError("no .nii ground-truth files in " + gt_dir.string());
    std::sort(case_ids.begin(), case_ids.end());

    std::vector<MetricRecord> records;
    for (const auto& case_id : case_ids) {
        std::string institution = "all";
        if (manifest_path) {
            const auto it = institution_of.find(case_id);
            if (it == institution_of.end())
                throw ValidationError("case '" + case_id + "' not listed in " + manifest_path->string());
            institution = it->second;
        }

        const LabelVolume gt = read_label_volume(gt_dir / (case_id + ".nii"));
        const fs::path pred_path = pred_dir / (case_id + ".nii");
        const bool have_pred = fs::exists(pred_path);
        std::optional<LabelVolume> pred;
        if (have_pred) {
            pred = read_label_volume(pred_path);
            if (!(pred->grid() == gt.grid()))
                throw ValidationError("prediction for '" + case_id + "' is on a different grid than ground truth");
        }

        for (const Region region : kAllRegions) {
            MetricRecord base{algorithm, institution, case_id, region, MetricKind::DSC, 0.0, !have_pred};
            if (have_pred) {
                const BinaryMask pm = region_mask(*pred, region);
                const BinaryMask gm = region_mask(gt, region);
                base.value = dice(pm, gm).value;
                records.push_back(base);
                base.metric = MetricKind::HD95;
                base.value = hd95(pm, gm).value;
                records.push_back(base);
            } else {
                records.push_back(base);
                base.metric = MetricKind::HD95;
                records.push_back(base);
            }
        }
    }
    write_metric_records_csv(out_csv, records);
    return records;
}

RankTable run_rank(const std::vector<fs::path>& metric_csvs, const fs::path& out_dir) {
    if (metric_csvs.size() < 2) throw ValidationError("rank needs at least two metric CSV inputs");
    std::vector<MetricRecord> records;
    for (const auto& path : metric_csvs) {
        auto part = read_metric_records_csv(path);
        records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    std::set<std::string> algorithms;
    for (const auto& r : records) algorithms.insert(r.algorithm);
    if (algorithms.size() < 2) throw ValidationError("rank needs records from at least two algorithms");

    const RankTable table = rank_algorithms(records);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    write_rank_table_csv(out_dir / "ranks.csv", table);
    write_json_file(out_dir / "report.json", rank_report(table, records));
    return table;
}

}  // namespace fedseg
