#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fedseg/model.hpp"

namespace fedseg {

// What a collaborator returns at the end of a round: its locally trained
// parameters plus the validation score of the consensus model it received.
struct ModelUpdate {
    std::string collaborator_id;
    ModelParams params;
    double val_score = 0.0;  // in [0, 1], refers to the received consensus
    int n_samples = 1;       // local training-case count
};

// Sample-count-weighted coordinatewise average. Updates are combined in
// collaborator-id order so the result is independent of caller ordering.
ModelParams fedavg_combine(std::span<const ModelUpdate> updates, const ModelParams& prev);

// Unweighted coordinatewise mean (baseline).
ModelParams uniform_combine(std::span<const ModelUpdate> updates, const ModelParams& prev);

// Validation-score-weighted average; falls back to uniform when all scores
// are zero. Optional strategy, not a default.
ModelParams score_weighted_combine(std::span<const ModelUpdate> updates, const ModelParams& prev);

struct SelectionPolicy {
    enum class Kind { All, Fraction };
    Kind kind = Kind::All;
    double fraction = 1.0;  // used by Fraction: selects ceil(fraction * K)
};

// Non-empty subset of the roster, in roster order. Fraction draws without
// replacement from the round's seeded stream.
std::vector<std::string> select_clients(const SelectionPolicy& policy, int round,
                                        const std::vector<std::string>& roster, std::uint64_t federation_seed);

enum class StragglerMode { Drop, ReuseStale, Deadline };

struct StragglerPolicy {
    StragglerMode mode = StragglerMode::Drop;
    double deadline_fraction = 1.0;  // Deadline keeps the first ceil(f * |selected|) responders
};

// Latest update each collaborator ever delivered, for reuse-stale rounds.
struct StaleCache {
    std::map<std::string, ModelUpdate> latest;

    void store(const ModelUpdate& update) { latest.insert_or_assign(update.collaborator_id, update); }
};

// Deterministic stand-in for network latency: responders are ordered by
// ascending hash of (seed, round, collaborator id).
std::uint64_t response_order_key(std::uint64_t federation_seed, int round, const std::string& collaborator_id);

// Resolves which updates feed aggregation this round. May return an empty
// set (e.g. drop policy with zero responders); the federation treats that as
// a failed round.
std::vector<ModelUpdate> apply_straggler_policy(const StragglerPolicy& policy,
                                                const std::vector<std::string>& selected,
                                                std::vector<ModelUpdate> responded, const StaleCache& cache,
                                                int round, std::uint64_t federation_seed);

// Collaborator availability per round: fixed schedules or an i.i.d.
// Bernoulli outage process on a seed-derived stream.
struct OutageModel {
    enum class Mode { None, Schedule, Bernoulli };
    Mode mode = Mode::None;
    double p_avail = 1.0;  // Bernoulli: probability of being reachable, in (0, 1]
    std::map<std::string, std::vector<bool>> schedule;

    bool available(std::uint64_t federation_seed, int round, const std::string& collaborator_id) const;
    // checks invariants against a roster and round count
    void validate(const std::vector<std::string>& roster, int rounds) const;
};

// A strategy bundles the three round hooks: client selection, update
// combination and straggler handling. Reference strategies are configured
// from a JSON parameter block; third parties register factories by name.
class Strategy {
  public:
    explicit Strategy(SelectionPolicy selection = {}, StragglerPolicy straggler = {})
        : selection_(selection), straggler_(straggler) {}
    virtual ~Strategy() = default;

    virtual std::vector<std::string> select(int round, const std::vector<std::string>& roster,
                                            std::uint64_t federation_seed) const {
        return select_clients(selection_, round, roster, federation_seed);
    }
    virtual ModelParams combine(std::span<const ModelUpdate> updates, const ModelParams& prev) const = 0;

    const StragglerPolicy& straggler_policy() const { return straggler_; }
    const SelectionPolicy& selection_policy() const { return selection_; }

    // Wire-size hooks; compression strategies may override, and the ledger
    // records whatever these return.
    virtual std::uint64_t consensus_wire_bytes(std::size_t param_count, int wire_width) const {
        return param_count * static_cast<std::uint64_t>(wire_width);
    }
    virtual std::uint64_t update_wire_bytes(std::size_t param_count, int wire_width) const {
        return param_count * static_cast<std::uint64_t>(wire_width);
    }

  private:
    SelectionPolicy selection_;
    StragglerPolicy straggler_;
};

using StrategyFactory = std::function<std::unique_ptr<Strategy>(const nlohmann::json& params)>;

void register_strategy(const std::string& name, StrategyFactory factory);
std::unique_ptr<Strategy> make_strategy(const std::string& name, const nlohmann::json& params);
std::vector<std::string> registered_strategies();

// Parses the shared "selection" / "straggler" blocks of a strategy
// parameter object (used by the built-in strategies).
SelectionPolicy parse_selection_policy(const nlohmann::json& params);
StragglerPolicy parse_straggler_policy(const nlohmann::json& params);
OutageModel parse_outage_model(const nlohmann::json& config);

}  // namespace fedseg
