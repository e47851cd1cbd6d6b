#include "fedseg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fedseg/errors.hpp"
#include "fedseg/rng.hpp"

namespace fedseg {

double TissueAppearance::mean_for_label(std::uint8_t label) const {
    switch (label) {
        case 0: return background;
        case 1: return ncr;
        case 2: return ed;
        case 4: return et;
    }
    throw ValidationError("no tissue appearance for label " + std::to_string(int(label)));
}

namespace {

void validate_spec(const InstitutionSpec& spec) {
    if (spec.id.empty()) throw ValidationError("institution id must not be empty");
    if (spec.n_cases < 2) throw ValidationError("institution needs n_cases >= 2 for a train/val split");
    if (!(spec.intensity_noise_sd >= 0.0)) throw ValidationError("intensity_noise_sd must be >= 0");
    const auto [r_lo, r_hi] = spec.blob_radius_range;
    if (!(r_lo > 0.0) || !(r_hi >= r_lo)) throw ValidationError("blob_radius_range must satisfy 0 < lo <= hi");
    validate_grid({spec.dims, spec.spacing});

    const int min_dim = std::min({spec.dims[0], spec.dims[1], spec.dims[2]});
    // full lesion = core + two shells; the center must be placeable so the
    // outermost sphere stays inside the volume
    const double max_total_radius = r_hi + 2.0 * kMaxShellWidth;
    if (2.0 * max_total_radius + 1.0 > static_cast<double>(min_dim))
        throw ValidationError("blob_radius_range [" + std::to_string(r_lo) + ", " + std::to_string(r_hi) +
                              "] infeasible for dims (min extent " + std::to_string(min_dim) +
                              "): lesion diameter up to " + std::to_string(2.0 * max_total_radius) +
                              " voxels does not fit");
}

std::string case_name(const std::string& institution, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_c%03d", index);
    return institution + buf;
}

}  // namespace

std::vector<Case> generate_institution(const InstitutionSpec& spec) {
    validate_spec(spec);
    const Grid grid{spec.dims, spec.spacing};

    std::vector<Case> cases;
    cases.reserve(static_cast<std::size_t>(spec.n_cases));

    for (int case_idx = 0; case_idx < spec.n_cases; ++case_idx) {
        Rng rng(derive_seed(spec.seed, "synthetic-case", static_cast<std::uint64_t>(case_idx)));

        // lesion geometry: core radius and the two shell widths, then a
        // center that keeps the whole lesion inside the volume
        const double r_core = rng.uniform(spec.blob_radius_range[0], spec.blob_radius_range[1]);
        const double w_ed = rng.uniform(1.0, kMaxShellWidth);
        const double w_ncr = rng.uniform(1.0, kMaxShellWidth);
        const double r_tc = r_core + w_ed;
        const double r_wt = r_tc + w_ncr;

        std::array<double, 3> center{};
        for (int axis = 0; axis < 3; ++axis) {
            const double lo = r_wt;
            const double hi = static_cast<double>(spec.dims[axis] - 1) - r_wt;
            center[axis] = rng.uniform(lo, hi);
        }

        std::vector<std::uint8_t> labels(grid.voxel_count(), 0);
        for (int z = 0; z < spec.dims[2]; ++z) {
            for (int y = 0; y < spec.dims[1]; ++y) {
                for (int x = 0; x < spec.dims[0]; ++x) {
                    const double dx = x - center[0], dy = y - center[1], dz = z - center[2];
                    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                    std::uint8_t label = 0;
                    if (dist <= r_core) label = 4;
                    else if (dist <= r_tc) label = 2;
                    else if (dist <= r_wt) label = 1;
                    labels[grid.index(x, y, z)] = label;
                }
            }
        }

        std::vector<float> image(grid.voxel_count());
        for (std::size_t i = 0; i < image.size(); ++i) {
            const double mean = spec.appearance.mean_for_label(labels[i]);
            const double value = mean + spec.intensity_offset + spec.intensity_noise_sd * rng.normal();
            image[i] = static_cast<float>(value);
        }

        cases.push_back(Case{case_name(spec.id, case_idx), IntensityVolume(grid, std::move(image)),
                             LabelVolume(grid, std::move(labels))});
    }
    return cases;
}

std::size_t validation_count(std::size_t n_cases) { return std::max<std::size_t>(1, n_cases / 5); }

SplitDataset split_cases(std::vector<Case> cases) {
    if (cases.size() < 2) throw ValidationError("need at least 2 cases to split");
    const std::size_t n_val = validation_count(cases.size());
    SplitDataset out;
    out.val.assign(std::make_move_iterator(cases.end() - static_cast<std::ptrdiff_t>(n_val)),
                   std::make_move_iterator(cases.end()));
    cases.erase(cases.end() - static_cast<std::ptrdiff_t>(n_val), cases.end());
    out.train = std::move(cases);
    return out;
}

}  // namespace fedseg
