#include "fedseg/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace fedseg {

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::DSC: return "DSC";
        case MetricKind::HD95: return "HD95";
    }
    throw ValidationError("unknown metric enumerator");
}

MetricKind metric_from_string(const std::string& s) {
    if (s == "DSC") return MetricKind::DSC;
    if (s == "HD95") return MetricKind::HD95;
    throw ValidationError("unknown metric '" + s + "', expected DSC or HD95");
}

bool higher_is_better(MetricKind kind) { return kind == MetricKind::DSC; }

namespace {

void require_same_grid(const BinaryMask& a, const BinaryMask& b) {
    if (!(a.grid() == b.grid()))
        throw ValidationError("mask grids differ (dims or spacing mismatch)");
}

double sq(double v) { return v * v; }

// Exact nearest-neighbor search over a uniform cell grid. Cells are pruned
// with conservative box-distance bounds, so results match an all-pairs scan
// to within rounding of the identical distance expression.
class PointGrid {
  public:
    explicit PointGrid(const SurfacePointSet& points) : points_(points) {
        lo_ = {points[0].x, points[0].y, points[0].z};
        std::array<double, 3> hi = lo_;
        for (const auto& p : points) {
            lo_[0] = std::min(lo_[0], p.x); hi[0] = std::max(hi[0], p.x);
            lo_[1] = std::min(lo_[1], p.y); hi[1] = std::max(hi[1], p.y);
            lo_[2] = std::min(lo_[2], p.z); hi[2] = std::max(hi[2], p.z);
        }
        const double max_extent = std::max({hi[0] - lo_[0], hi[1] - lo_[1], hi[2] - lo_[2]});
        const double target_cells = std::cbrt(static_cast<double>(points.size()));
        cell_ = std::max(max_extent / std::max(target_cells, 1.0), 1e-9);
        cmin_ = cmax_ = cell_coord(points[0]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = cell_coord(points[i]);
            for (int axis = 0; axis < 3; ++axis) {
                cmin_[axis] = std::min(cmin_[axis], c[axis]);
                cmax_[axis] = std::max(cmax_[axis], c[axis]);
            }
            cells_[key_of(c)].push_back(i);
        }
    }

    double nearest_distance(const SurfacePoint& q) const {
        const std::array<int, 3> qc = cell_coord(q);
        // occupied cells all lie within Chebyshev [ring_lo, ring_hi] of qc
        int ring_lo = 0, ring_hi = 0;
        for (int axis = 0; axis < 3; ++axis) {
            const int gap = std::max({cmin_[axis] - qc[axis], qc[axis] - cmax_[axis], 0});
            ring_lo = std::max(ring_lo, gap);
            ring_hi = std::max({ring_hi, std::abs(qc[axis] - cmin_[axis]), std::abs(qc[axis] - cmax_[axis])});
        }
        double best = std::numeric_limits<double>::infinity();
        for (int ring = ring_lo; ring <= ring_hi; ++ring) {
            // rings two past the best hit cannot improve it (one-cell slack
            // absorbs the floor rounding in cell assignment)
            if (best < std::numeric_limits<double>::infinity() &&
                (static_cast<double>(ring) - 2.0) * cell_ > best)
                break;
            scan_ring(q, qc, ring, best);
        }
        return best;
    }

  private:
    std::array<int, 3> cell_coord(const SurfacePoint& p) const {
        return {static_cast<int>(std::floor((p.x - lo_[0]) / cell_)),
                static_cast<int>(std::floor((p.y - lo_[1]) / cell_)),
                static_cast<int>(std::floor((p.z - lo_[2]) / cell_))};
    }

    static std::uint64_t key_of(const std::array<int, 3>& c) {
        const auto u = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) & 0x1fffffull; };
        return u(c[0]) | (u(c[1]) << 21) | (u(c[2]) << 42);
    }

    // minimal distance from q to the axis-aligned box of cell c
    double box_distance(const SurfacePoint& q, const std::array<int, 3>& c) const {
        const std::array<double, 3> qv{q.x, q.y, q.z};
        double acc = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
            const double lo = lo_[axis] + c[axis] * cell_;
            const double hi = lo + cell_;
            if (qv[axis] < lo) acc += sq(lo - qv[axis]);
            else if (qv[axis] > hi) acc += sq(qv[axis] - hi);
        }
        return std::sqrt(acc);
    }

    void scan_ring(const SurfacePoint& q, const std::array<int, 3>& qc, int ring, double& best) const {
        for (int dz = -ring; dz <= ring; ++dz) {
            for (int dy = -ring; dy <= ring; ++dy) {
                for (int dx = -ring; dx <= ring; ++dx) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
                    const std::array<int, 3> c{qc[0] + dx, qc[1] + dy, qc[2] + dz};
                    if (best < std::numeric_limits<double>::infinity() && box_distance(q, c) > best) continue;
                    const auto it = cells_.find(key_of(c));
                    if (it == cells_.end()) continue;
                    for (const std::size_t idx : it->second) {
                        const auto& p = points_[idx];
                        const double d = std::sqrt(sq(q.x - p.x) + sq(q.y - p.y) + sq(q.z - p.z));
                        best = std::min(best, d);
                    }
                }
            }
        }
    }

    const SurfacePointSet& points_;
    std::array<double, 3> lo_{};
    double cell_ = 1.0;
    std::array<int, 3> cmin_{}, cmax_{};
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

double directed_percentile(const SurfacePointSet& from, const PointGrid& to_grid, double percent) {
    std::vector<double> dists;
    dists.reserve(from.size());
    for (const auto& p : from) dists.push_back(to_grid.nearest_distance(p));
    std::sort(dists.begin(), dists.end());
    const double n = static_cast<double>(dists.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil(percent * n / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, dists.size());
    return dists[rank - 1];
}

}  // namespace

MetricValue dice(const BinaryMask& pm, const BinaryMask& gt) {
    require_same_grid(pm, gt);
    std::size_t inter = 0, n_pm = 0, n_gt = 0;
    const auto& a = pm.data();
    const auto& b = gt.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        n_pm += a[i];
        n_gt += b[i];
        inter += static_cast<std::size_t>(a[i] & b[i]);
    }
    if (n_pm == 0 && n_gt == 0) return {MetricKind::DSC, 1.0, true};
    return {MetricKind::DSC, 2.0 * static_cast<double>(inter) / static_cast<double>(n_pm + n_gt), false};
}

SurfacePointSet surface_voxels(const BinaryMask& mask) {
    const auto& dims = mask.dims();
    const auto& sp = mask.spacing();
    SurfacePointSet out;
    for (int z = 0; z < dims[2]; ++z) {
        for (int y = 0; y < dims[1]; ++y) {
            for (int x = 0; x < dims[0]; ++x) {
                if (!mask.at(x, y, z)) continue;
                const bool boundary = x == 0 || x == dims[0] - 1 || y == 0 || y == dims[1] - 1 ||
                                      z == 0 || z == dims[2] - 1;
                const bool exposed = boundary || !mask.at(x - 1, y, z) || !mask.at(x + 1, y, z) ||
                                     !mask.at(x, y - 1, z) || !mask.at(x, y + 1, z) ||
                                     !mask.at(x, y, z - 1) || !mask.at(x, y, z + 1);
                if (exposed)
                    out.push_back({x * static_cast<double>(sp[0]), y * static_cast<double>(sp[1]),
                                   z * static_cast<double>(sp[2])});
            }
        }
    }
    return out;
}

double directed_percentile_distance(const SurfacePointSet& from, const SurfacePointSet& to, double percent) {
    if (from.empty() || to.empty())
        throw ValidationError("directed_percentile_distance requires non-empty point sets");
    if (!(percent > 0.0) || percent > 100.0)
        throw ValidationError("percentile must lie in (0, 100]");
    const PointGrid grid(to);
    return directed_percentile(from, grid, percent);
}

double physical_diagonal(const Grid& grid) {
    double acc = 0.0;
    for (int axis = 0; axis < 3; ++axis)
        acc += sq(static_cast<double>(grid.dims[axis]) * static_cast<double>(grid.spacing[axis]));
    return std::sqrt(acc);
}

MetricValue hd95(const BinaryMask& pm, const BinaryMask& gt, const Hd95Options& options) {
    require_same_grid(pm, gt);
    const std::size_t n_pm = pm.foreground_count();
    const std::size_t n_gt = gt.foreground_count();
    if (n_pm == 0 && n_gt == 0) return {MetricKind::HD95, 0.0, true};
    if (n_pm == 0 || n_gt == 0) {
        const double penalty = options.empty_penalty.value_or(physical_diagonal(pm.grid()));
        if (!(penalty >= 0.0)) throw ValidationError("empty-mask penalty must be non-negative");
        return {MetricKind::HD95, penalty, true};
    }

    const SurfacePointSet surf_pm = surface_voxels(pm);
    const SurfacePointSet surf_gt = surface_voxels(gt);
    const PointGrid grid_pm(surf_pm);
    const PointGrid grid_gt(surf_gt);
    const double d_pm_to_gt = directed_percentile(surf_pm, grid_gt, 95.0);
    const double d_gt_to_pm = directed_percentile(surf_gt, grid_pm, 95.0);
    return {MetricKind::HD95, std::max(d_pm_to_gt, d_gt_to_pm), false};
}

}  // namespace fedseg
