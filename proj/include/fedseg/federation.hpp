#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedseg/aggregation.hpp"
#include "fedseg/model.hpp"
#include "fedseg/trainer.hpp"

namespace fedseg {

struct FederationConfig {
    int rounds = 1;
    std::uint64_t seed = 0;
    int wire_width = 4;
    std::uint64_t metadata_bytes = 16;  // score + sample count + id envelope per update
    int epochs = 1;                     // local epochs per round
    double lr = 0.5;
    int jobs = 1;                       // intra-round worker bound; never affects results
};

// A participating institution: identifier plus its local train/val splits.
struct Collaborator {
    std::string id;
    Dataset train_set;
    Dataset val_set;

    int n_samples() const { return static_cast<int>(train_set.size()); }
};

struct RoundRecord {
    int round_index = 0;  // 1-based
    std::vector<std::string> selected;
    std::vector<std::string> responded;
    std::uint64_t bytes_down = 0;  // |selected| * consensus wire size
    std::uint64_t bytes_up = 0;    // |responded| * (update wire size + metadata)
    // Sample-count-weighted mean of the val scores reported this round; they
    // grade the consensus model the collaborators received at round start.
    double consensus_val_score = 0.0;
};

struct CommLedger {
    std::vector<RoundRecord> records;

    std::uint64_t total_bytes_down() const;
    std::uint64_t total_bytes_up() const;
    std::uint64_t cumulative_bytes() const;  // down + up over all rounds
};

// One line of history: the round's ledger record and the consensus model the
// round produced.
struct RoundSnapshot {
    RoundRecord record;
    ModelParams consensus;
};

using FederationHistory = std::vector<RoundSnapshot>;

struct FederationResult {
    ModelParams final_model;
    CommLedger ledger;
    FederationHistory history;
    int best_round = 0;  // 1-based round whose snapshot became final_model
};

// Both readings of the round-cost metric: cumulative bytes across rounds,
// and mean bytes per round multiplied by the round count. They coincide; the
// report carries both.
struct CostReport {
    int rounds = 0;
    std::uint64_t cumulative_bytes = 0;
    double mean_bytes_per_round = 0.0;
    double product_metric = 0.0;
};

// Runs `config.rounds` synchronous rounds: select, distribute the consensus
// (bytes down), validate-then-train locally, return updates (bytes up),
// resolve stragglers, combine into the next consensus. The final model is
// the snapshot of the round with the best consensus_val_score (earliest on
// ties). Deterministic in (config, data, strategy): reruns are bit-identical
// regardless of `jobs`.
FederationResult run_federation(const FederationConfig& config, const std::vector<Collaborator>& collaborators,
                                const OutageModel& outage, const Trainer& trainer, const Strategy& strategy);

std::size_t best_round_index(const FederationHistory& history);  // 0-based, ties -> earliest
const ModelParams& checkpoint_select(const FederationHistory& history);

CostReport communication_cost(const CommLedger& ledger);

}  // namespace fedseg
