#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fedseg/trainer.hpp"
#include "fedseg/volume.hpp"

namespace fedseg {

// Mean intensity per tissue class; every voxel draws its value from its
// class mean plus the institution's offset and noise.
struct TissueAppearance {
    double background = 0.15;
    double ncr = 0.45;  // label 1
    double ed = 0.70;   // label 2
    double et = 0.95;   // label 4

    double mean_for_label(std::uint8_t label) const;
};

// One synthetic institution: its case count and the distribution shift that
// distinguishes it from the others (intensity offset/noise, lesion size).
struct InstitutionSpec {
    std::string id;
    int n_cases = 2;
    double intensity_offset = 0.0;
    double intensity_noise_sd = 0.0;
    std::array<double, 2> blob_radius_range{3.0, 6.0};  // ET core radius bounds, voxels
    std::uint64_t seed = 0;
    Dims dims{24, 24, 24};
    Spacing spacing{1.0f, 1.0f, 1.0f};
    TissueAppearance appearance;
};

// Widest ring each of the two shells (ED around the core, NCR outside it)
// may add to the lesion radius.
constexpr double kMaxShellWidth = 2.0;

// Deterministically generates `n_cases` cases from spec.seed. Lesions are
// concentric: ET core (label 4) wrapped by an ED shell (label 2) and an NCR
// shell (label 1), so ET ⊆ TC ⊆ WT holds by construction under the default
// region mapping.
std::vector<Case> generate_institution(const InstitutionSpec& spec);

// Last fifth of the cases (at least one) becomes the validation split.
std::size_t validation_count(std::size_t n_cases);

struct SplitDataset {
    Dataset train;
    Dataset val;
};
SplitDataset split_cases(std::vector<Case> cases);

}  // namespace fedseg
