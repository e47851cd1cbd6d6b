#pragma once

// Seeded random fixtures shared by the property tests.

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "fedseg/rng.hpp"
#include "fedseg/volume.hpp"

namespace testgen {

inline fedseg::Grid random_grid(fedseg::Rng& rng, int max_dim, bool mixed_spacing = true) {
    fedseg::Grid grid;
    for (int axis = 0; axis < 3; ++axis) {
        grid.dims[axis] = static_cast<int>(rng.uniform_int(1, max_dim));
        grid.spacing[axis] =
            mixed_spacing ? static_cast<float>(rng.uniform(0.5, 2.5)) : 1.0f;
    }
    return grid;
}

inline fedseg::BinaryMask random_mask(fedseg::Rng& rng, const fedseg::Grid& grid, double p_foreground) {
    std::vector<std::uint8_t> data(grid.voxel_count());
    for (auto& v : data) v = rng.u01() < p_foreground ? 1 : 0;
    return fedseg::BinaryMask(grid, std::move(data));
}

inline fedseg::LabelVolume random_label_volume(fedseg::Rng& rng, const fedseg::Grid& grid) {
    static constexpr std::uint8_t kLabels[4] = {0, 1, 2, 4};
    std::vector<std::uint8_t> data(grid.voxel_count());
    for (auto& v : data) v = kLabels[rng.uniform_int(0, 3)];
    return fedseg::LabelVolume(grid, std::move(data));
}

// unique scratch directory under the system temp root, removed on scope exit
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("fedseg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

  private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

}  // namespace testgen
