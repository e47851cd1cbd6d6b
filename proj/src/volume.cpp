#include "fedseg/volume.hpp"

#include <algorithm>
#include <cmath>

namespace fedseg {

void validate_grid(const Grid& grid) {
    for (int axis = 0; axis < 3; ++axis) {
        if (grid.dims[axis] < 1)
            throw ValidationError("grid dims must all be >= 1, got " + std::to_string(grid.dims[axis]) +
                                  " on axis " + std::to_string(axis));
        if (!(grid.spacing[axis] > 0.0f) || !std::isfinite(grid.spacing[axis]))
            throw ValidationError("grid spacing must be positive and finite on axis " + std::to_string(axis));
    }
}

namespace {

void check_length(const Grid& grid, std::size_t actual) {
    if (actual != grid.voxel_count())
        throw ValidationError("volume data length " + std::to_string(actual) + " does not match dims product " +
                              std::to_string(grid.voxel_count()));
}

}  // namespace

LabelVolume::LabelVolume(Grid grid, std::vector<std::uint8_t> data)
    : grid_(grid), data_(std::move(data)) {
    validate_grid(grid_);
    check_length(grid_, data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!is_valid_label(data_[i]))
            throw ValidationError("invalid label value " + std::to_string(int(data_[i])) + " at linear index " +
                                  std::to_string(i) + "; labels must be one of {0,1,2,4}");
    }
}

LabelVolume LabelVolume::filled(Grid grid, std::uint8_t value) {
    validate_grid(grid);
    return LabelVolume(grid, std::vector<std::uint8_t>(grid.voxel_count(), value));
}

IntensityVolume::IntensityVolume(Grid grid, std::vector<float> data)
    : grid_(grid), data_(std::move(data)) {
    validate_grid(grid_);
    check_length(grid_, data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i]))
            throw ValidationError("non-finite intensity at linear index " + std::to_string(i));
    }
}

IntensityVolume IntensityVolume::filled(Grid grid, float value) {
    validate_grid(grid);
    return IntensityVolume(grid, std::vector<float>(grid.voxel_count(), value));
}

BinaryMask::BinaryMask(Grid grid, std::vector<std::uint8_t> data)
    : grid_(grid), data_(std::move(data)) {
    validate_grid(grid_);
    check_length(grid_, data_.size());
    for (auto& v : data_) v = v ? 1 : 0;
}

BinaryMask BinaryMask::empty(Grid grid) {
    validate_grid(grid);
    return BinaryMask(grid, std::vector<std::uint8_t>(grid.voxel_count(), 0));
}

std::size_t BinaryMask::foreground_count() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

std::string to_string(Region region) {
    switch (region) {
        case Region::ET: return "ET";
        case Region::TC: return "TC";
        case Region::WT: return "WT";
    }
    throw ValidationError("unknown region enumerator");
}

Region region_from_string(const std::string& s) {
    if (s == "ET") return Region::ET;
    if (s == "TC") return Region::TC;
    if (s == "WT") return Region::WT;
    throw ValidationError("unknown region '" + s + "', expected ET, TC or WT");
}

RegionMap::RegionMap(std::vector<std::uint8_t> et, std::vector<std::uint8_t> tc, std::vector<std::uint8_t> wt)
    : labels_{std::move(et), std::move(tc), std::move(wt)} {
    for (const auto& set : labels_) {
        if (set.empty()) throw ValidationError("region label set must not be empty");
        for (auto label : set) {
            if (!is_valid_label(label))
                throw ValidationError("region label set contains invalid label " + std::to_string(int(label)));
        }
    }
}

const RegionMap& RegionMap::challenge_default() {
    static const RegionMap map({4}, {2, 4}, {1, 2, 4});
    return map;
}

bool RegionMap::contains(Region region, std::uint8_t label) const {
    const auto& set = labels_[static_cast<std::size_t>(region)];
    return std::find(set.begin(), set.end(), label) != set.end();
}

const std::vector<std::uint8_t>& RegionMap::labels(Region region) const {
    return labels_[static_cast<std::size_t>(region)];
}

BinaryMask region_mask(const LabelVolume& vol, Region region, const RegionMap& map) {
    // membership table over the 8 possible byte values {0..7}; label 4 is max
    std::array<std::uint8_t, 8> member{};
    for (auto label : map.labels(region)) member[label] = 1;

    std::vector<std::uint8_t> out(vol.data().size());
    const auto& in = vol.data();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = member[in[i] & 7];
    return BinaryMask(vol.grid(), std::move(out));
}

}  // namespace fedseg
