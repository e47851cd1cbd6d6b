#include "fedseg/federation.hpp"

#include <algorithm>
#include <future>
#include <optional>
#include <set>

#include "fedseg/errors.hpp"
#include "fedseg/rng.hpp"

namespace fedseg {

std::uint64_t CommLedger::total_bytes_down() const {
    std::uint64_t total = 0;
    for (const auto& r : records) total += r.bytes_down;
    return total;
}

std::uint64_t CommLedger::total_bytes_up() const {
    std::uint64_t total = 0;
    for (const auto& r : records) total += r.bytes_up;
    return total;
}

std::uint64_t CommLedger::cumulative_bytes() const { return total_bytes_down() + total_bytes_up(); }

namespace {

void validate_federation_inputs(const FederationConfig& config, const std::vector<Collaborator>& collaborators) {
    if (config.rounds < 1) throw ValidationError("federation needs at least one round");
    if (config.wire_width < 1) throw ValidationError("wire_width must be >= 1");
    if (config.epochs < 0) throw ValidationError("epochs must be >= 0");
    if (config.jobs < 1) throw ValidationError("jobs must be >= 1");
    if (collaborators.empty()) throw ValidationError("federation needs at least one collaborator");
    std::set<std::string> ids;
    for (const auto& c : collaborators) {
        if (c.id.empty()) throw ValidationError("collaborator id must not be empty");
        if (!ids.insert(c.id).second) throw ValidationError("duplicate collaborator id '" + c.id + "'");
        if (c.n_samples() < 1)
            throw ValidationError("collaborator '" + c.id + "' has an empty training set");
    }
}

struct LocalResult {
    ModelUpdate update;
};

// One collaborator's round: validate the received consensus first, then
// train from it. Pure given its arguments, so rounds can fan out freely.
std::optional<LocalResult> run_collaborator(const FederationConfig& config, const OutageModel& outage, int round,
                                            const Collaborator& collab, const Trainer& trainer,
                                            const ModelParams& consensus) {
    if (!outage.available(config.seed, round, collab.id)) return std::nullopt;

    const double val_score = trainer.validate(consensus, collab.val_set);
    if (!(val_score >= 0.0) || !(val_score <= 1.0))
        throw ContractError("trainer validate() returned " + std::to_string(val_score) + ", outside [0, 1]");

    const std::uint64_t train_seed =
        derive_seed(config.seed, "local-train", static_cast<std::uint64_t>(round), fnv1a64(collab.id));
    ModelParams trained = trainer.train(consensus, collab.train_set, config.epochs, config.lr, train_seed);
    if (trained.values.size() != consensus.values.size())
        throw ContractError("trainer train() for '" + collab.id + "' returned " +
                            std::to_string(trained.values.size()) + " parameters, federation uses " +
                            std::to_string(consensus.values.size()));
    validate_params(trained);
    trained.wire_width = consensus.wire_width;

    return LocalResult{ModelUpdate{collab.id, std::move(trained), val_score, collab.n_samples()}};
}

}  // namespace

FederationResult run_federation(const FederationConfig& config, const std::vector<Collaborator>& collaborators,
                                const OutageModel& outage, const Trainer& trainer, const Strategy& strategy) {
    validate_federation_inputs(config, collaborators);

    std::vector<std::string> roster;
    for (const auto& c : collaborators) roster.push_back(c.id);
    outage.validate(roster, config.rounds);

    ModelParams consensus = trainer.init_params(derive_seed(config.seed, "init-params"));
    consensus.wire_width = config.wire_width;
    validate_params(consensus);
    const std::size_t param_count = consensus.values.size();

    FederationResult result;
    StaleCache cache;

    for (int round = 1; round <= config.rounds; ++round) {
        const std::vector<std::string> selected = strategy.select(round, roster, config.seed);
        if (selected.empty()) throw ContractError("strategy selected no collaborators in round " + std::to_string(round));
        for (const auto& id : selected) {
            if (std::find(roster.begin(), roster.end(), id) == roster.end())
                throw ContractError("strategy selected unknown collaborator '" + id + "'");
        }

        RoundRecord record;
        record.round_index = round;
        record.selected = selected;
        record.bytes_down =
            static_cast<std::uint64_t>(selected.size()) * strategy.consensus_wire_bytes(param_count, config.wire_width);

        // fan out validate+train, bounded by config.jobs; results land in
        // selection order so scheduling cannot reorder anything downstream
        std::vector<std::optional<LocalResult>> results(selected.size());
        const auto run_one = [&](std::size_t idx) {
            const auto it = std::find_if(collaborators.begin(), collaborators.end(),
                                         [&](const Collaborator& c) { return c.id == selected[idx]; });
            return run_collaborator(config, outage, round, *it, trainer, consensus);
        };
        if (config.jobs == 1) {
            for (std::size_t i = 0; i < selected.size(); ++i) results[i] = run_one(i);
        } else {
            for (std::size_t base = 0; base < selected.size(); base += static_cast<std::size_t>(config.jobs)) {
                const std::size_t end = std::min(selected.size(), base + static_cast<std::size_t>(config.jobs));
                std::vector<std::future<std::optional<LocalResult>>> wave;
                for (std::size_t i = base; i < end; ++i)
                    wave.push_back(std::async(std::launch::async, run_one, i));
                for (std::size_t i = base; i < end; ++i) results[i] = wave[i - base].get();
            }
        }

        std::vector<ModelUpdate> responded;
        for (auto& r : results) {
            if (r) responded.push_back(std::move(r->update));
        }
        for (const auto& u : responded) record.responded.push_back(u.collaborator_id);
        record.bytes_up = static_cast<std::uint64_t>(responded.size()) *
                          (strategy.update_wire_bytes(param_count, config.wire_width) + config.metadata_bytes);

        double score_weight = 0.0, score_acc = 0.0;
        for (const auto& u : responded) {
            score_acc += static_cast<double>(u.n_samples) * u.val_score;
            score_weight += static_cast<double>(u.n_samples);
        }
        record.consensus_val_score = score_weight > 0.0 ? score_acc / score_weight : 0.0;

        const std::vector<ModelUpdate> effective = apply_straggler_policy(
            strategy.straggler_policy(), selected, responded, cache, round, config.seed);
        if (effective.empty()) {
            throw RoundFailedError(round, "round " + std::to_string(round) +
                                              " failed: no usable updates (straggler policy left nothing to combine)");
        }
        for (const auto& u : responded) cache.store(u);

        consensus = strategy.combine(effective, consensus);
        if (consensus.values.size() != param_count)
            throw ContractError("strategy combine() changed the parameter dimension");
        validate_params(consensus);
        consensus.wire_width = config.wire_width;

        result.ledger.records.push_back(record);
        result.history.push_back(RoundSnapshot{std::move(record), consensus});
    }

    const std::size_t best = best_round_index(result.history);
    result.best_round = result.history[best].record.round_index;
    result.final_model = result.history[best].consensus;
    return result;
}

std::size_t best_round_index(const FederationHistory& history) {
    if (history.empty()) throw ValidationError("federation history is empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i].record.consensus_val_score > history[best].record.consensus_val_score) best = i;
    }
    return best;
}

const ModelParams& checkpoint_select(const FederationHistory& history) {
    return history[best_round_index(history)].consensus;
}

CostReport communication_cost(const CommLedger& ledger) {
    CostReport report;
    report.rounds = static_cast<int>(ledger.records.size());
    report.cumulative_bytes = ledger.cumulative_bytes();
    if (report.rounds > 0) {
        report.mean_bytes_per_round = static_cast<double>(report.cumulative_bytes) / report.rounds;
        report.product_metric = report.mean_bytes_per_round * report.rounds;
    }
    return report;
}

}  // namespace fedseg
