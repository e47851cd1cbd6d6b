#pragma once

// Brute-force reference implementations used to cross-check the library.
// Everything here recomputes results from first principles and must stay
// independent of the production code paths it checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedseg/ranking.hpp"
#include "fedseg/volume.hpp"

namespace oracle {

// exact set counting for the overlap metric
inline double dice_by_counting(const fedseg::BinaryMask& pm, const fedseg::BinaryMask& gt) {
    long long inter = 0, total = 0;
    const auto& d = pm.dims();
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                const bool a = pm.at(x, y, z), b = gt.at(x, y, z);
                inter += (a && b) ? 1 : 0;
                total += (a ? 1 : 0) + (b ? 1 : 0);
            }
    if (total == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

struct Point {
    double x, y, z;
};

// contour rule re-derived literally: foreground with any background
// 6-neighbor, or touching the volume edge
inline std::vector<Point> surface_points(const fedseg::BinaryMask& mask) {
    std::vector<Point> pts;
    const auto& d = mask.dims();
    const auto& s = mask.spacing();
    const int off[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                if (!mask.at(x, y, z)) continue;
                bool on_surface = false;
                for (const auto& o : off) {
                    const int nx = x + o[0], ny = y + o[1], nz = z + o[2];
                    if (nx < 0 || nx >= d[0] || ny < 0 || ny >= d[1] || nz < 0 || nz >= d[2]) {
                        on_surface = true;  // volume boundary counts as exposed
                    } else if (!mask.at(nx, ny, nz)) {
                        on_surface = true;
                    }
                }
                if (on_surface) pts.push_back({x * double(s[0]), y * double(s[1]), z * double(s[2])});
            }
    return pts;
}

// all-pairs nearest-neighbor distances, nearest-rank percentile
inline double directed_percentile_all_pairs(const std::vector<Point>& from, const std::vector<Point>& to,
                                            double percent) {
    std::vector<double> nearest;
    nearest.reserve(from.size());
    for (const auto& a : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : to) {
            const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
            best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        nearest.push_back(best);
    }
    std::sort(nearest.begin(), nearest.end());
    long long rank = static_cast<long long>(std::ceil(percent * static_cast<double>(nearest.size()) / 100.0));
    if (rank < 1) rank = 1;
    if (rank > static_cast<long long>(nearest.size())) rank = static_cast<long long>(nearest.size());
    return nearest[static_cast<std::size_t>(rank - 1)];
}

inline double hd95_all_pairs(const fedseg::BinaryMask& pm, const fedseg::BinaryMask& gt, double empty_penalty) {
    std::size_t n_pm = 0, n_gt = 0;
    const auto& d = pm.dims();
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                n_pm += pm.at(x, y, z) ? 1 : 0;
                n_gt += gt.at(x, y, z) ? 1 : 0;
            }
    if (n_pm == 0 && n_gt == 0) return 0.0;
    if (n_pm == 0 || n_gt == 0) return empty_penalty;
    const auto a = surface_points(pm);
    const auto b = surface_points(gt);
    return std::max(directed_percentile_all_pairs(a, b, 95.0), directed_percentile_all_pairs(b, a, 95.0));
}

// Naive re-implementation of the whole ranking scheme: rank per comparison
// (minimum rank on ties, missing strictly worst), average per institution,
// average across institutions, minimum-rank final placement.
inline std::map<std::string, int> naive_final_ranks(const std::vector<fedseg::MetricRecord>& records) {
    std::set<std::string> algs, insts;
    for (const auto& r : records) {
        algs.insert(r.algorithm);
        insts.insert(r.institution);
    }

    std::map<std::string, std::vector<double>> per_inst_avgs;  // algorithm -> one avg per institution
    for (const auto& inst : insts) {
        // comparison key -> (algorithm -> value or missing)
        std::map<std::string, std::map<std::string, std::optional<double>>> by_comparison;
        for (const auto& r : records) {
            if (r.institution != inst) continue;
            const std::string key =
                r.case_id + "#" + fedseg::to_string(r.region) + "#" + fedseg::to_string(r.metric);
            by_comparison[key][r.algorithm] = r.missing ? std::nullopt : std::optional<double>(r.value);
        }
        std::map<std::string, double> rank_sums;
        std::map<std::string, int> rank_counts;
        for (const auto& [key, vals] : by_comparison) {
            const bool is_dsc = key.find("#DSC") != std::string::npos;
            std::size_t n_present = 0;
            for (const auto& [alg, v] : vals)
                if (v) ++n_present;
            for (const auto& [alg, v] : vals) {
                double rank;
                if (!v) {
                    rank = static_cast<double>(n_present) + 1.0;
                } else {
                    int better = 0;
                    for (const auto& [alg2, v2] : vals) {
                        if (alg2 == alg || !v2) continue;
                        if (is_dsc ? (*v2 > *v) : (*v2 < *v)) ++better;
                    }
                    rank = better + 1.0;
                }
                rank_sums[alg] += rank;
                rank_counts[alg] += 1;
            }
        }
        for (const auto& alg : algs) per_inst_avgs[alg].push_back(rank_sums[alg] / rank_counts[alg]);
    }

    std::map<std::string, double> means;
    for (const auto& alg : algs) {
        double acc = 0.0;
        for (const double v : per_inst_avgs[alg]) acc += v;
        means[alg] = acc / static_cast<double>(per_inst_avgs[alg].size());
    }
    std::map<std::string, int> finals;
    for (const auto& [alg, mean] : means) {
        int better = 0;
        for (const auto& [alg2, mean2] : means)
            if (alg2 != alg && mean2 < mean) ++better;
        finals[alg] = better + 1;
    }
    return finals;
}

}  // namespace oracle
