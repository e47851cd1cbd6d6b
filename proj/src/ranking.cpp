#include "fedseg/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fedseg/errors.hpp"

namespace fedseg {

std::vector<double> rank_values(std::span<const std::optional<double>> values, bool higher_better) {
    const std::size_t n = values.size();
    std::size_t n_present = 0;
    for (const auto& v : values) {
        if (v) {
            if (!std::isfinite(*v)) throw ValidationError("cannot rank a non-finite value");
            ++n_present;
        }
    }

    std::vector<double> ranks(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!values[i]) {
            // missing ranks strictly below every present value; multiple
            // missing entries tie at that rank
            ranks[i] = static_cast<double>(n_present) + 1.0;
            continue;
        }
        std::size_t strictly_better = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!values[j] || j == i) continue;
            const bool better = higher_better ? *values[j] > *values[i] : *values[j] < *values[i];
            if (better) ++strictly_better;
        }
        ranks[i] = static_cast<double>(strictly_better) + 1.0;
    }
    return ranks;
}

namespace {

std::set<std::string> institutions_of(std::span<const MetricRecord> records) {
    std::set<std::string> out;
    for (const auto& r : records) out.insert(r.institution);
    return out;
}

std::set<std::string> algorithms_of(std::span<const MetricRecord> records) {
    std::set<std::string> out;
    for (const auto& r : records) out.insert(r.algorithm);
    return out;
}

// per-institution mean of present case values for one (algorithm, metric,
// region) key, keyed by institution; errors if any institution lacks values
std::map<std::string, double> institution_means(std::span<const MetricRecord> records,
                                                const std::string& algorithm, MetricKind metric, Region region) {
    if (records.empty()) throw ValidationError("no metric records");
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& inst : institutions_of(records)) acc[inst] = {0.0, 0};
    for (const auto& r : records) {
        if (r.algorithm != algorithm || r.metric != metric || r.region != region || r.missing) continue;
        auto& [sum, count] = acc[r.institution];
        sum += r.value;
        ++count;
    }
    std::map<std::string, double> means;
    for (const auto& [inst, pair] : acc) {
        if (pair.second == 0)
            throw ValidationError("algorithm '" + algorithm + "' has no " + to_string(metric) + "/" +
                                  to_string(region) + " values at institution '" + inst + "'");
        means[inst] = pair.first / static_cast<double>(pair.second);
    }
    return means;
}

}  // namespace

double mean_performance(std::span<const MetricRecord> records, const std::string& algorithm, MetricKind metric,
                        Region region) {
    const auto means = institution_means(records, algorithm, metric, region);
    double acc = 0.0;
    for (const auto& [inst, mean] : means) acc += mean;
    return acc / static_cast<double>(means.size());
}

std::pair<std::string, double> worst_case_performance(std::span<const MetricRecord> records,
                                                      const std::string& algorithm, MetricKind metric,
                                                      Region region) {
    const auto means = institution_means(records, algorithm, metric, region);
    auto worst = means.begin();
    for (auto it = std::next(means.begin()); it != means.end(); ++it) {
        const bool is_worse = higher_is_better(metric) ? it->second < worst->second : it->second > worst->second;
        if (is_worse) worst = it;
    }
    return {worst->first, worst->second};
}

std::map<std::string, double> per_institution_rank(std::span<const MetricRecord> records,
                                                   const std::string& institution) {
    const auto algorithms = algorithms_of(records);
    if (algorithms.empty()) throw ValidationError("no metric records");

    // comparison key -> algorithm -> value (nullopt = missing-flagged)
    std::set<std::string> cases;
    std::map<std::string, std::map<std::string, std::optional<double>>> comparisons;
    for (const auto& r : records) {
        if (r.institution != institution) continue;
        cases.insert(r.case_id);
        const std::string key = r.case_id + "|" + to_string(r.region) + "|" + to_string(r.metric);
        auto& per_alg = comparisons[key];
        if (per_alg.count(r.algorithm))
            throw ValidationError("duplicate record for (" + r.algorithm + ", " + institution + ", " + key + ")");
        per_alg[r.algorithm] = r.missing ? std::nullopt : std::optional<double>(r.value);
    }
    if (cases.empty()) throw ValidationError("no records at institution '" + institution + "'");

    // every algorithm must cover every case x region x metric comparison
    const std::size_t expected = cases.size() * 3 * 2;
    if (comparisons.size() != expected)
        throw ValidationError("institution '" + institution + "' has " + std::to_string(comparisons.size()) +
                              " comparisons, expected " + std::to_string(expected) +
                              " (cases x 3 regions x 2 metrics)");

    std::map<std::string, double> rank_sum;
    for (const auto& alg : algorithms) rank_sum[alg] = 0.0;

    for (const auto& [key, per_alg] : comparisons) {
        std::vector<std::optional<double>> values;
        for (const auto& alg : algorithms) {
            const auto it = per_alg.find(alg);
            if (it == per_alg.end())
                throw ValidationError("algorithm '" + alg + "' lacks a record for comparison (" + institution +
                                      ", " + key + "); flag missing predictions instead of omitting rows");
            values.push_back(it->second);
        }
        const MetricKind metric = metric_from_string(key.substr(key.rfind('|') + 1));
        const auto ranks = rank_values(values, higher_is_better(metric));
        std::size_t i = 0;
        for (const auto& alg : algorithms) rank_sum[alg] += ranks[i++];
    }

    std::map<std::string, double> avg;
    for (const auto& [alg, sum] : rank_sum) avg[alg] = sum / static_cast<double>(comparisons.size());
    return avg;
}

RankTable final_rank(const PerInstitutionRanks& per_institution) {
    if (per_institution.empty()) throw ValidationError("no per-institution ranks");

    RankTable table;
    table.per_institution = per_institution;
    std::set<std::string> institutions;
    for (const auto& [alg, by_inst] : per_institution)
        for (const auto& [inst, rank] : by_inst) institutions.insert(inst);
    table.institutions.assign(institutions.begin(), institutions.end());

    for (const auto& [alg, by_inst] : per_institution) {
        if (by_inst.size() != institutions.size())
            throw ValidationError("algorithm '" + alg + "' is missing per-institution ranks (ragged input)");
        double acc = 0.0;
        for (const auto& inst : table.institutions) acc += by_inst.at(inst);
        table.mean_rank[alg] = acc / static_cast<double>(institutions.size());
    }

    std::vector<std::optional<double>> means;
    std::vector<std::string> algs;
    for (const auto& [alg, mean] : table.mean_rank) {
        algs.push_back(alg);
        means.push_back(mean);
    }
    const auto ranks = rank_values(means, /*higher_better=*/false);
    for (std::size_t i = 0; i < algs.size(); ++i)
        table.final_rank[algs[i]] = static_cast<int>(std::llround(ranks[i]));

    table.algorithms = algs;
    std::sort(table.algorithms.begin(), table.algorithms.end(), [&](const std::string& a, const std::string& b) {
        const int ra = table.final_rank.at(a), rb = table.final_rank.at(b);
        return ra != rb ? ra < rb : a < b;
    });
    return table;
}

RankTable rank_algorithms(std::span<const MetricRecord> records) {
    if (records.empty()) throw ValidationError("no metric records");
    PerInstitutionRanks per_institution;
    for (const auto& inst : institutions_of(records)) {
        const auto by_alg = per_institution_rank(records, inst);
        for (const auto& [alg, rank] : by_alg) per_institution[alg][inst] = rank;
    }
    return final_rank(per_institution);
}

}  // namespace fedseg
