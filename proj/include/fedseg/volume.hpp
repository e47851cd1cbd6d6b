#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fedseg/errors.hpp"

namespace fedseg {

using Dims = std::array<int, 3>;
// Millimetres per voxel. Stored as float so values survive a header
// round-trip bit for bit.
using Spacing = std::array<float, 3>;

// Voxel lattice shared by every volume type. Data is x-fastest:
// index = x + nx*(y + ny*z).
struct Grid {
    Dims dims{1, 1, 1};
    Spacing spacing{1.0f, 1.0f, 1.0f};

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
               static_cast<std::size_t>(dims[2]);
    }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }
    bool in_bounds(int x, int y, int z) const {
        return x >= 0 && x < dims[0] && y >= 0 && y < dims[1] && z >= 0 && z < dims[2];
    }
    bool operator==(const Grid&) const = default;
};

void validate_grid(const Grid& grid);

inline bool is_valid_label(std::uint8_t v) { return v == 0 || v == 1 || v == 2 || v == 4; }

// Tumor sub-region label field over a grid. Labels are restricted to
// {0, 1, 2, 4}; volumes are immutable once constructed.
class LabelVolume {
  public:
    LabelVolume(Grid grid, std::vector<std::uint8_t> data);
    static LabelVolume filled(Grid grid, std::uint8_t value);

    const Grid& grid() const { return grid_; }
    const Dims& dims() const { return grid_.dims; }
    const Spacing& spacing() const { return grid_.spacing; }
    const std::vector<std::uint8_t>& data() const { return data_; }
    std::uint8_t at(int x, int y, int z) const { return data_[grid_.index(x, y, z)]; }

    bool operator==(const LabelVolume&) const = default;

  private:
    Grid grid_;
    std::vector<std::uint8_t> data_;
};

// Scalar image over a grid, single channel, finite float values.
class IntensityVolume {
  public:
    IntensityVolume(Grid grid, std::vector<float> data);
    static IntensityVolume filled(Grid grid, float value);

    const Grid& grid() const { return grid_; }
    const Dims& dims() const { return grid_.dims; }
    const Spacing& spacing() const { return grid_.spacing; }
    const std::vector<float>& data() const { return data_; }
    float at(int x, int y, int z) const { return data_[grid_.index(x, y, z)]; }

    bool operator==(const IntensityVolume&) const = default;

  private:
    Grid grid_;
    std::vector<float> data_;
};

// Boolean foreground field; one byte per voxel, values 0/1.
class BinaryMask {
  public:
    BinaryMask(Grid grid, std::vector<std::uint8_t> data);
    static BinaryMask empty(Grid grid);

    const Grid& grid() const { return grid_; }
    const Dims& dims() const { return grid_.dims; }
    const Spacing& spacing() const { return grid_.spacing; }
    const std::vector<std::uint8_t>& data() const { return data_; }
    bool at(int x, int y, int z) const { return data_[grid_.index(x, y, z)] != 0; }
    std::size_t foreground_count() const;

    bool operator==(const BinaryMask&) const = default;

  private:
    Grid grid_;
    std::vector<std::uint8_t> data_;
};

enum class Region { ET, TC, WT };

constexpr std::array<Region, 3> kAllRegions{Region::ET, Region::TC, Region::WT};

std::string to_string(Region region);
Region region_from_string(const std::string& s);

// Region -> label-set mapping. The challenge default is
// ET = {4}, TC = {2, 4}, WT = {1, 2, 4}; alternative mappings can be
// configured where a different grouping of labels is wanted.
class RegionMap {
  public:
    static const RegionMap& challenge_default();
    RegionMap(std::vector<std::uint8_t> et, std::vector<std::uint8_t> tc, std::vector<std::uint8_t> wt);

    bool contains(Region region, std::uint8_t label) const;
    const std::vector<std::uint8_t>& labels(Region region) const;

  private:
    std::array<std::vector<std::uint8_t>, 3> labels_;
};

// Foreground = voxels whose label belongs to the region's label set.
BinaryMask region_mask(const LabelVolume& vol, Region region,
                       const RegionMap& map = RegionMap::challenge_default());

}  // namespace fedseg
