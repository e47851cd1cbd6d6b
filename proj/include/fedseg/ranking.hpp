#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedseg/metrics.hpp"
#include "fedseg/volume.hpp"

namespace fedseg {

// One scored comparison unit: what one algorithm achieved on one case,
// region and metric at one institution. `missing` marks predictions that
// were never produced; those rank strictly worst.
struct MetricRecord {
    std::string algorithm;
    std::string institution;
    std::string case_id;
    Region region = Region::ET;
    MetricKind metric = MetricKind::DSC;
    double value = 0.0;
    bool missing = false;
};

// Competition ("minimum rank") ranks for one comparison. Entries are
// nullopt for missing values; those share the rank right below every
// present value. Present entries rank by value, ties share the best rank.
std::vector<double> rank_values(std::span<const std::optional<double>> values, bool higher_better);

// Mean over institutions of the per-institution mean of case values:
// institutions weigh equally, not cases. Missing records are skipped; an
// institution with no usable value for the key is an error.
double mean_performance(std::span<const MetricRecord> records, const std::string& algorithm, MetricKind metric,
                        Region region);

// Institution with the worst per-institution mean (lowest for DSC, highest
// for HD95) and that mean.
std::pair<std::string, double> worst_case_performance(std::span<const MetricRecord> records,
                                                      const std::string& algorithm, MetricKind metric,
                                                      Region region);

// Rank-then-aggregate within one institution: algorithms are ranked on each
// of the N_k cases x 3 regions x 2 metrics comparisons, and each
// algorithm's ranks are averaged. Every algorithm must have a record
// (possibly missing-flagged) for every comparison.
std::map<std::string, double> per_institution_rank(std::span<const MetricRecord> records,
                                                   const std::string& institution);

// algorithm -> institution -> average rank
using PerInstitutionRanks = std::map<std::string, std::map<std::string, double>>;

struct RankTable {
    std::vector<std::string> algorithms;    // sorted by final rank, then name
    std::vector<std::string> institutions;  // sorted
    PerInstitutionRanks per_institution;
    std::map<std::string, double> mean_rank;
    std::map<std::string, int> final_rank;  // ties share the minimum rank
};

// Final ranks from per-institution average ranks: ascending mean, minimum
// rank on ties. Every algorithm needs a rank at every institution.
RankTable final_rank(const PerInstitutionRanks& per_institution);

// Full pipeline over a record table: per-institution ranking at each
// institution, then final aggregation.
RankTable rank_algorithms(std::span<const MetricRecord> records);

}  // namespace fedseg
