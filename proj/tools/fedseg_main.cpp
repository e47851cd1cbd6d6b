#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fedseg/errors.hpp"
#include "fedseg/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

nlohmann::json load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw fedseg::ValidationError("cannot open config file " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw fedseg::ValidationError(path.string() + ": " + e.what());
    }
}

nlohmann::json parse_params(const std::string& text, const char* what) {
    if (text.empty()) return nlohmann::json::object();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw fedseg::ValidationError(std::string(what) + ": " + e.what());
    }
}

struct CommonArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

int cmd_gen_data(const CommonArgs& args) {
    nlohmann::json config = load_config(args.config);
    if (args.seed) config["seed"] = *args.seed;
    const auto parsed = fedseg::parse_gen_config(config);
    const auto rows = fedseg::run_gen_data(parsed, args.out);
    std::cout << "generated " << rows.size() << " cases across " << parsed.institutions.size()
              << " institutions into " << args.out << "\n";
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    nlohmann::json config = load_config(args.config);
    if (args.seed) config["seed"] = *args.seed;
    auto parsed = fedseg::parse_simulate_config(config, fs::path(args.config).parent_path());
    parsed.fed.jobs = args.jobs;
    const auto result = fedseg::run_simulate(parsed, args.out);
    const auto cost = fedseg::communication_cost(result.ledger);
    std::cout << "rounds: " << cost.rounds << "\n"
              << "bytes down: " << result.ledger.total_bytes_down() << "\n"
              << "bytes up: " << result.ledger.total_bytes_up() << "\n"
              << "cumulative bytes: " << cost.cumulative_bytes << "\n"
              << "mean bytes/round x rounds: " << cost.product_metric << "\n"
              << "best round: " << result.best_round << " (score "
              << result.history[fedseg::best_round_index(result.history)].record.consensus_val_score << ")\n"
              << "artifacts in " << args.out << ": model.bin, ledger.csv, history.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedseg: federated segmentation round simulator and scoring toolkit"};
    app.require_subcommand(1);

    CommonArgs gen_args;
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic multi-institution dataset");
    gen->add_option("--config", gen_args.config, "JSON data spec")->required();
    gen->add_option("--out", gen_args.out, "output dataset directory")->required();
    gen->add_option("--seed", gen_args.seed, "override the config seed");

    CommonArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run a federated training simulation");
    sim->add_option("--config", sim_args.config, "JSON federation config")->required();
    sim->add_option("--out", sim_args.out, "output run directory")->required();
    sim->add_option("--seed", sim_args.seed, "override the config seed");
    sim->add_option("--jobs", sim_args.jobs, "intra-round worker bound (results are identical for any value)")
        ->check(CLI::PositiveNumber);

    std::string model_path, manifest_path, trainer_name = "reference", trainer_params_text, split = "all";
    std::string pred_out;
    auto* pred = app.add_subcommand("predict", "write model predictions for manifest cases");
    pred->add_option("--model", model_path, "model.bin from simulate")->required();
    pred->add_option("--manifest", manifest_path, "dataset manifest.csv")->required();
    pred->add_option("--out", pred_out, "output directory for predicted label volumes")->required();
    pred->add_option("--trainer", trainer_name, "trainer that owns the model (default: reference)");
    pred->add_option("--trainer-params", trainer_params_text, "trainer parameter JSON");
    pred->add_option("--split", split, "predict train, val or all cases (default: all)");

    std::string eval_pred_dir, eval_gt_dir, eval_out, eval_algorithm = "algorithm";
    std::string eval_manifest;
    auto* eval = app.add_subcommand("evaluate", "score predictions against ground truth");
    eval->add_option("--pred", eval_pred_dir, "directory of predicted label volumes")->required();
    eval->add_option("--gt", eval_gt_dir, "directory of ground-truth label volumes")->required();
    eval->add_option("--out", eval_out, "output metric record CSV")->required();
    eval->add_option("--algorithm", eval_algorithm, "algorithm id for the records");
    eval->add_option("--manifest", eval_manifest, "manifest.csv mapping cases to institutions");

    std::vector<std::string> rank_inputs;
    std::string rank_out;
    auto* rank = app.add_subcommand("rank", "rank algorithms from metric record CSVs");
    rank->add_option("--out", rank_out, "output directory for ranks.csv and report.json")->required();
    rank->add_option("inputs", rank_inputs, "metric record CSVs (>= 2 algorithms)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage problems are validation errors
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_args);
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (pred->parsed()) {
            fedseg::run_predict(model_path, manifest_path, trainer_name,
                                parse_params(trainer_params_text, "--trainer-params"), split, pred_out);
            std::cout << "predictions written to " << pred_out << "\n";
            return 0;
        }
        if (eval->parsed()) {
            std::optional<fs::path> manifest;
            if (!eval_manifest.empty()) manifest = eval_manifest;
            const auto records = fedseg::run_evaluate(eval_pred_dir, eval_gt_dir, manifest, eval_algorithm, eval_out);
            std::cout << records.size() << " metric records written to " << eval_out << "\n";
            return 0;
        }
        if (rank->parsed()) {
            std::vector<fs::path> inputs(rank_inputs.begin(), rank_inputs.end());
            const auto table = fedseg::run_rank(inputs, rank_out);
            for (const auto& alg : table.algorithms)
                std::cout << table.final_rank.at(alg) << "  " << alg << "  (mean rank "
                          << table.mean_rank.at(alg) << ")\n";
            return 0;
        }
    } catch (const fedseg::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
