#include "fedseg/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fedseg/errors.hpp"
#include "fedseg/rng.hpp"

namespace fedseg {

namespace {

// epsilon-guarded ceil so exact products like 0.4 * 5 do not round up to 3
std::size_t ceil_count(double fraction, std::size_t n) {
    const double raw = fraction * static_cast<double>(n);
    return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

std::vector<std::size_t> sorted_by_id(std::span<const ModelUpdate> updates) {
    std::vector<std::size_t> order(updates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return updates[a].collaborator_id < updates[b].collaborator_id;
    });
    return order;
}

ModelParams weighted_combine(std::span<const ModelUpdate> updates, const ModelParams& prev,
                             const std::function<double(const ModelUpdate&)>& weight_of) {
    if (updates.empty()) throw ValidationError("combine requires at least one update");
    const std::size_t dim = prev.values.size();
    for (const auto& u : updates) {
        if (u.params.values.size() != dim)
            throw ValidationError("update from '" + u.collaborator_id + "' has dimension " +
                                  std::to_string(u.params.values.size()) + ", federation uses " +
                                  std::to_string(dim));
    }
    // a single update passes through bit-identically
    if (updates.size() == 1) {
        if (!(weight_of(updates.front()) > 0.0)) throw ValidationError("combine weights sum to zero");
        ModelParams out = updates.front().params;
        out.wire_width = prev.wire_width;
        return out;
    }

    const auto order = sorted_by_id(updates);
    double total = 0.0;
    for (const auto idx : order) {
        const double w = weight_of(updates[idx]);
        if (!(w >= 0.0)) throw ValidationError("negative combine weight");
        total += w;
    }
    if (!(total > 0.0)) throw ValidationError("combine weights sum to zero");

    ModelParams out;
    out.wire_width = prev.wire_width;
    out.values.assign(dim, 0.0);
    for (const auto idx : order) {
        const double w = weight_of(updates[idx]) / total;
        const auto& v = updates[idx].params.values;
        for (std::size_t i = 0; i < dim; ++i) out.values[i] += w * v[i];
    }
    return out;
}

}  // namespace

ModelParams fedavg_combine(std::span<const ModelUpdate> updates, const ModelParams& prev) {
    for (const auto& u : updates) {
        if (u.n_samples < 1)
            throw ValidationError("update from '" + u.collaborator_id + "' has n_samples < 1");
    }
    return weighted_combine(updates, prev,
                            [](const ModelUpdate& u) { return static_cast<double>(u.n_samples); });
}

ModelParams uniform_combine(std::span<const ModelUpdate> updates, const ModelParams& prev) {
    return weighted_combine(updates, prev, [](const ModelUpdate&) { return 1.0; });
}

ModelParams score_weighted_combine(std::span<const ModelUpdate> updates, const ModelParams& prev) {
    double total = 0.0;
    for (const auto& u : updates) total += u.val_score;
    if (total <= 0.0) return uniform_combine(updates, prev);
    return weighted_combine(updates, prev, [](const ModelUpdate& u) { return u.val_score; });
}

std::vector<std::string> select_clients(const SelectionPolicy& policy, int round,
                                        const std::vector<std::string>& roster, std::uint64_t federation_seed) {
    if (roster.empty()) throw ValidationError("selection requires a non-empty roster");
    if (policy.kind == SelectionPolicy::Kind::All) return roster;

    if (!(policy.fraction > 0.0) || policy.fraction > 1.0)
        throw ValidationError("selection fraction must lie in (0, 1]");
    const std::size_t count = std::clamp<std::size_t>(ceil_count(policy.fraction, roster.size()), 1, roster.size());

    // partial Fisher-Yates over roster indices on the round's stream
    std::vector<std::size_t> indices(roster.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    Rng rng(derive_seed(federation_seed, "client-selection", static_cast<std::uint64_t>(round)));
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(
                               rng.uniform_int(0, static_cast<std::int64_t>(indices.size() - i) - 1));
        std::swap(indices[i], indices[j]);
    }
    std::sort(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(count));

    std::vector<std::string> selected;
    selected.reserve(count);
    for (std::size_t i = 0; i < count; ++i) selected.push_back(roster[indices[i]]);
    return selected;
}

std::uint64_t response_order_key(std::uint64_t federation_seed, int round, const std::string& collaborator_id) {
    return derive_seed(federation_seed, "response-order", static_cast<std::uint64_t>(round),
                       fnv1a64(collaborator_id));
}

std::vector<ModelUpdate> apply_straggler_policy(const StragglerPolicy& policy,
                                                const std::vector<std::string>& selected,
                                                std::vector<ModelUpdate> responded, const StaleCache& cache,
                                                int round, std::uint64_t federation_seed) {
    for (const auto& u : responded) {
        if (std::find(selected.begin(), selected.end(), u.collaborator_id) == selected.end())
            throw ValidationError("responder '" + u.collaborator_id + "' was not selected this round");
    }

    switch (policy.mode) {
        case StragglerMode::Drop:
            return responded;

        case StragglerMode::ReuseStale: {
            for (const auto& id : selected) {
                const bool responded_now = std::any_of(responded.begin(), responded.end(),
                                                       [&](const ModelUpdate& u) { return u.collaborator_id == id; });
                if (responded_now) continue;
                if (const auto it = cache.latest.find(id); it != cache.latest.end())
                    responded.push_back(it->second);
            }
            return responded;
        }

        case StragglerMode::Deadline: {
            if (!(policy.deadline_fraction > 0.0) || policy.deadline_fraction > 1.0)
                throw ValidationError("deadline fraction must lie in (0, 1]");
            std::stable_sort(responded.begin(), responded.end(), [&](const ModelUpdate& a, const ModelUpdate& b) {
                const auto ka = response_order_key(federation_seed, round, a.collaborator_id);
                const auto kb = response_order_key(federation_seed, round, b.collaborator_id);
                return ka != kb ? ka < kb : a.collaborator_id < b.collaborator_id;
            });
            const std::size_t keep = std::min(ceil_count(policy.deadline_fraction, selected.size()), responded.size());
            responded.resize(keep);
            return responded;
        }
    }
    throw ValidationError("unknown straggler mode");
}

bool OutageModel::available(std::uint64_t federation_seed, int round, const std::string& collaborator_id) const {
    switch (mode) {
        case Mode::None:
            return true;
        case Mode::Schedule: {
            const auto it = schedule.find(collaborator_id);
            if (it == schedule.end())
                throw ValidationError("outage schedule has no entry for '" + collaborator_id + "'");
            if (static_cast<std::size_t>(round) > it->second.size())
                throw ValidationError("outage schedule for '" + collaborator_id + "' is shorter than round " +
                                      std::to_string(round));
            return it->second[static_cast<std::size_t>(round - 1)];
        }
        case Mode::Bernoulli: {
            Rng rng(derive_seed(federation_seed, "outage", static_cast<std::uint64_t>(round),
                                fnv1a64(collaborator_id)));
            return rng.u01() < p_avail;
        }
    }
    throw ValidationError("unknown outage mode");
}

void OutageModel::validate(const std::vector<std::string>& roster, int rounds) const {
    if (mode == Mode::Bernoulli && (!(p_avail > 0.0) || p_avail > 1.0))
        throw ValidationError("outage p_avail must lie in (0, 1]");
    if (mode == Mode::Schedule) {
        for (const auto& id : roster) {
            const auto it = schedule.find(id);
            if (it == schedule.end())
                throw ValidationError("outage schedule missing collaborator '" + id + "'");
            if (it->second.size() < static_cast<std::size_t>(rounds))
                throw ValidationError("outage schedule for '" + id + "' covers " +
                                      std::to_string(it->second.size()) + " rounds, federation runs " +
                                      std::to_string(rounds));
        }
    }
}

namespace {

class FedAvgStrategy : public Strategy {
  public:
    using Strategy::Strategy;
    ModelParams combine(std::span<const ModelUpdate> updates, const ModelParams& prev) const override {
        return fedavg_combine(updates, prev);
    }
};

class UniformStrategy : public Strategy {
  public:
    using Strategy::Strategy;
    ModelParams combine(std::span<const ModelUpdate> updates, const ModelParams& prev) const override {
        return uniform_combine(updates, prev);
    }
};

class ScoreWeightedStrategy : public Strategy {
  public:
    using Strategy::Strategy;
    ModelParams combine(std::span<const ModelUpdate> updates, const ModelParams& prev) const override {
        return score_weighted_combine(updates, prev);
    }
};

template <typename S>
StrategyFactory simple_factory() {
    return [](const nlohmann::json& params) -> std::unique_ptr<Strategy> {
        return std::make_unique<S>(parse_selection_policy(params), parse_straggler_policy(params));
    };
}

std::map<std::string, StrategyFactory>& strategy_map() {
    static std::map<std::string, StrategyFactory> map{
        {"fedavg", simple_factory<FedAvgStrategy>()},
        {"uniform", simple_factory<UniformStrategy>()},
        {"score_weighted", simple_factory<ScoreWeightedStrategy>()},
    };
    return map;
}

}  // namespace

void register_strategy(const std::string& name, StrategyFactory factory) {
    strategy_map()[name] = std::move(factory);
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const nlohmann::json& params) {
    const auto& map = strategy_map();
    const auto it = map.find(name);
    if (it == map.end()) {
        std::string known;
        for (const auto& [k, v] : map) known += (known.empty() ? "" : ", ") + k;
        throw ValidationError("unknown strategy '" + name + "'; registered strategies: " + known);
    }
    return it->second(params);
}

std::vector<std::string> registered_strategies() {
    std::vector<std::string> names;
    for (const auto& [k, v] : strategy_map()) names.push_back(k);
    return names;
}

SelectionPolicy parse_selection_policy(const nlohmann::json& params) {
    SelectionPolicy policy;
    if (!params.is_object() || !params.contains("selection")) return policy;
    const auto& sel = params.at("selection");
    const std::string kind = sel.value("policy", "all");
    if (kind == "all") {
        policy.kind = SelectionPolicy::Kind::All;
    } else if (kind == "fraction") {
        policy.kind = SelectionPolicy::Kind::Fraction;
        if (!sel.contains("fraction")) throw ValidationError("selection policy 'fraction' needs a fraction value");
        policy.fraction = sel.at("fraction").get<double>();
        if (!(policy.fraction > 0.0) || policy.fraction > 1.0)
            throw ValidationError("selection fraction must lie in (0, 1]");
    } else {
        throw ValidationError("unknown selection policy '" + kind + "', expected all or fraction");
    }
    return policy;
}

StragglerPolicy parse_straggler_policy(const nlohmann::json& params) {
    StragglerPolicy policy;
    if (!params.is_object() || !params.contains("straggler")) return policy;
    const auto& strag = params.at("straggler");
    const std::string mode = strag.value("policy", "drop");
    if (mode == "drop") {
        policy.mode = StragglerMode::Drop;
    } else if (mode == "reuse-stale") {
        policy.mode = StragglerMode::ReuseStale;
    } else if (mode == "deadline") {
        policy.mode = StragglerMode::Deadline;
        if (!strag.contains("deadline_fraction"))
            throw ValidationError("straggler policy 'deadline' needs a deadline_fraction value");
        policy.deadline_fraction = strag.at("deadline_fraction").get<double>();
        if (!(policy.deadline_fraction > 0.0) || policy.deadline_fraction > 1.0)
            throw ValidationError("deadline fraction must lie in (0, 1]");
    } else {
        throw ValidationError("unknown straggler policy '" + mode + "', expected drop, reuse-stale or deadline");
    }
    return policy;
}

OutageModel parse_outage_model(const nlohmann::json& config) {
    OutageModel model;
    if (config.is_null()) return model;
    const std::string mode = config.value("mode", "none");
    if (mode == "none") {
        model.mode = OutageModel::Mode::None;
    } else if (mode == "bernoulli") {
        model.mode = OutageModel::Mode::Bernoulli;
        if (!config.contains("p_avail")) throw ValidationError("bernoulli outage needs p_avail");
        model.p_avail = config.at("p_avail").get<double>();
        if (!(model.p_avail > 0.0) || model.p_avail > 1.0)
            throw ValidationError("outage p_avail must lie in (0, 1]");
    } else if (mode == "schedule") {
        model.mode = OutageModel::Mode::Schedule;
        if (!config.contains("schedule")) throw ValidationError("schedule outage needs a schedule object");
        for (const auto& [id, rounds] : config.at("schedule").items()) {
            std::vector<bool> avail;
            for (const auto& v : rounds) avail.push_back(v.get<bool>());
            model.schedule[id] = std::move(avail);
        }
    } else {
        throw ValidationError("unknown outage mode '" + mode + "', expected none, schedule or bernoulli");
    }
    return model;
}

}  // namespace fedseg
