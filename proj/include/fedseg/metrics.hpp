#pragma once

#include <optional>
#include <vector>

#include "fedseg/volume.hpp"

namespace fedseg {

enum class MetricKind { DSC, HD95 };

std::string to_string(MetricKind kind);
MetricKind metric_from_string(const std::string& s);

// True when a larger value means a better segmentation (DSC); distances rank
// the other way round.
bool higher_is_better(MetricKind kind);

struct MetricValue {
    MetricKind kind;
    double value = 0.0;
    // set when an empty-mask policy decided the value instead of a measurement
    bool degenerate = false;
};

// Millimetre coordinates of boundary voxel centers (index * spacing).
struct SurfacePoint {
    double x, y, z;
};
using SurfacePointSet = std::vector<SurfacePoint>;

// DSC = 2|GT ∩ PM| / (|GT| + |PM|). Both masks empty counts as perfect
// agreement: 1.0 with the degenerate flag set.
MetricValue dice(const BinaryMask& pm, const BinaryMask& gt);

// Foreground voxels with at least one background 6-neighbor, or lying on the
// volume boundary.
SurfacePointSet surface_voxels(const BinaryMask& mask);

// Nearest-rank p-th percentile (p in (0, 100]) of nearest-neighbor distances
// from every point of `from` to the set `to`: sort ascending, take the
// 1-based element at ceil(p * n / 100).
double directed_percentile_distance(const SurfacePointSet& from, const SurfacePointSet& to, double percent);

struct Hd95Options {
    // Value reported when exactly one mask is empty. Defaults to the
    // physical-extent diagonal of the grid, the largest realizable distance.
    std::optional<double> empty_penalty;
};

// Symmetric 95th-percentile surface distance: max of the two directed
// percentile distances. Both masks empty -> 0.0 (degenerate); exactly one
// empty -> penalty (degenerate).
MetricValue hd95(const BinaryMask& pm, const BinaryMask& gt, const Hd95Options& options = {});

// Euclidean diagonal of the grid's physical extent in millimetres.
double physical_diagonal(const Grid& grid);

}  // namespace fedseg
