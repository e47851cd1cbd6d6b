#include "fedseg/reference_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fedseg/errors.hpp"
#include "fedseg/metrics.hpp"
#include "fedseg/rng.hpp"

namespace fedseg {

int class_index_for_label(std::uint8_t label) {
    switch (label) {
        case 0: return 0;
        case 1: return 1;
        case 2: return 2;
        case 4: return 3;
    }
    throw ValidationError("no class for label " + std::to_string(int(label)));
}

VoxelFeatures voxel_features(const IntensityVolume& image, int x, int y, int z) {
    const auto& dims = image.dims();
    const Grid& grid = image.grid();

    double neighbor_sum = 0.0;
    int neighbor_count = 0;
    constexpr std::array<std::array<int, 3>, 6> kOffsets{
        {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};
    for (const auto& [dx, dy, dz] : kOffsets) {
        const int nx = x + dx, ny = y + dy, nz = z + dz;
        if (!grid.in_bounds(nx, ny, nz)) continue;
        neighbor_sum += image.at(nx, ny, nz);
        ++neighbor_count;
    }
    const double own = image.at(x, y, z);
    const double neighbor_mean = neighbor_count > 0 ? neighbor_sum / neighbor_count : own;

    double dist_sq = 0.0, half_diag_sq = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        const double c = (dims[axis] - 1) / 2.0;
        const double d = (axis == 0 ? x : axis == 1 ? y : z) - c;
        dist_sq += d * d;
        half_diag_sq += c * c;
    }
    const double center_dist = half_diag_sq > 0.0 ? std::sqrt(dist_sq / half_diag_sq) : 0.0;

    return {own, neighbor_mean, center_dist, 1.0};
}

namespace {

std::array<double, kVoxelClassCount> class_probs(std::span<const double> weights, const VoxelFeatures& f) {
    std::array<double, kVoxelClassCount> logits{};
    for (int c = 0; c < kVoxelClassCount; ++c) {
        double z = 0.0;
        for (int j = 0; j < kVoxelFeatureCount; ++j) z += weights[c * kVoxelFeatureCount + j] * f[j];
        logits[c] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    std::array<double, kVoxelClassCount> probs{};
    for (int c = 0; c < kVoxelClassCount; ++c) {
        probs[c] = std::exp(logits[c] - zmax);
        denom += probs[c];
    }
    for (auto& p : probs) p /= denom;
    return probs;
}

void check_weights(std::span<const double> weights) {
    if (weights.size() != kReferenceParamCount)
        throw ValidationError("expected " + std::to_string(kReferenceParamCount) + " weights, got " +
                              std::to_string(weights.size()));
}

struct TrainingSamples {
    std::vector<VoxelFeatures> features;
    std::vector<int> targets;
};

TrainingSamples collect_samples(const Dataset& data) {
    TrainingSamples samples;
    std::size_t total = 0;
    for (const auto& c : data) total += c.image.grid().voxel_count();
    samples.features.reserve(total);
    samples.targets.reserve(total);
    for (const auto& c : data) {
        const auto& dims = c.image.dims();
        if (!(c.image.grid() == c.labels.grid()))
            throw ValidationError("case '" + c.id + "': image and labels on different grids");
        for (int z = 0; z < dims[2]; ++z)
            for (int y = 0; y < dims[1]; ++y)
                for (int x = 0; x < dims[0]; ++x) {
                    samples.features.push_back(voxel_features(c.image, x, y, z));
                    samples.targets.push_back(class_index_for_label(c.labels.at(x, y, z)));
                }
    }
    return samples;
}

void descend_batch(std::vector<double>& weights, std::span<const VoxelFeatures> features,
                   std::span<const int> targets, double lr) {
    const std::vector<double> grad = cross_entropy_grad(weights, features, targets);
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] -= lr * grad[i];
}

}  // namespace

double cross_entropy_loss(std::span<const double> weights, std::span<const VoxelFeatures> features,
                          std::span<const int> class_targets) {
    check_weights(weights);
    if (features.size() != class_targets.size() || features.empty())
        throw ValidationError("loss needs equally many features and targets, at least one");
    double acc = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto probs = class_probs(weights, features[i]);
        acc += -std::log(std::max(probs[static_cast<std::size_t>(class_targets[i])], 1e-300));
    }
    return acc / static_cast<double>(features.size());
}

std::vector<double> cross_entropy_grad(std::span<const double> weights, std::span<const VoxelFeatures> features,
                                       std::span<const int> class_targets) {
    check_weights(weights);
    if (features.size() != class_targets.size() || features.empty())
        throw ValidationError("gradient needs equally many features and targets, at least one");
    std::vector<double> grad(kReferenceParamCount, 0.0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto probs = class_probs(weights, features[i]);
        for (int c = 0; c < kVoxelClassCount; ++c) {
            const double delta = probs[c] - (c == class_targets[i] ? 1.0 : 0.0);
            for (int j = 0; j < kVoxelFeatureCount; ++j)
                grad[c * kVoxelFeatureCount + j] += delta * features[i][j];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(features.size());
    for (auto& g : grad) g *= inv_n;
    return grad;
}

ReferenceTrainerOptions parse_reference_trainer_options(const nlohmann::json& params) {
    ReferenceTrainerOptions options;
    if (params.is_null()) return options;
    if (!params.is_object()) throw ValidationError("trainer params must be a JSON object");
    options.batch_size = params.value("batch_size", options.batch_size);
    options.init_sd = params.value("init_sd", options.init_sd);
    options.wire_width = params.value("wire_width", options.wire_width);
    if (options.batch_size < 0) throw ValidationError("batch_size must be >= 0 (0 = full batch)");
    if (!(options.init_sd >= 0.0)) throw ValidationError("init_sd must be >= 0");
    if (options.wire_width < 1) throw ValidationError("wire_width must be >= 1");
    return options;
}

ModelParams ReferenceTrainer::init_params(std::uint64_t seed) const {
    Rng rng(seed);
    ModelParams params;
    params.wire_width = options_.wire_width;
    params.values.resize(kReferenceParamCount);
    for (auto& v : params.values) v = options_.init_sd * rng.normal();
    return params;
}

ModelParams ReferenceTrainer::train(const ModelParams& params, const Dataset& train_set, int epochs, double lr,
                                    std::uint64_t seed) const {
    check_weights(params.values);
    if (train_set.empty()) throw ValidationError("train set is empty");
    if (epochs < 0) throw ValidationError("epochs must be >= 0");

    const TrainingSamples samples = collect_samples(train_set);
    ModelParams out = params;
    Rng rng(derive_seed(seed, "sgd-shuffle"));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        if (options_.batch_size == 0) {
            descend_batch(out.values, samples.features, samples.targets, lr);
            continue;
        }
        std::vector<std::size_t> order(samples.features.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle(order, rng);

        const std::size_t batch = static_cast<std::size_t>(options_.batch_size);
        std::vector<VoxelFeatures> bf;
        std::vector<int> bt;
        for (std::size_t base = 0; base < order.size(); base += batch) {
            const std::size_t end = std::min(order.size(), base + batch);
            bf.clear();
            bt.clear();
            for (std::size_t i = base; i < end; ++i) {
                bf.push_back(samples.features[order[i]]);
                bt.push_back(samples.targets[order[i]]);
            }
            descend_batch(out.values, bf, bt, lr);
        }
    }
    return out;
}

double ReferenceTrainer::validate(const ModelParams& params, const Dataset& val_set) const {
    check_weights(params.values);
    if (val_set.empty()) throw ValidationError("validation set is empty");
    double acc = 0.0;
    int count = 0;
    for (const auto& c : val_set) {
        const LabelVolume pred = predict(params, c.image);
        for (const Region region : kAllRegions) {
            acc += dice(region_mask(pred, region), region_mask(c.labels, region)).value;
            ++count;
        }
    }
    return acc / count;
}

LabelVolume ReferenceTrainer::predict(const ModelParams& params, const IntensityVolume& image) const {
    check_weights(params.values);
    const auto& dims = image.dims();
    std::vector<std::uint8_t> labels(image.grid().voxel_count());
    for (int z = 0; z < dims[2]; ++z) {
        for (int y = 0; y < dims[1]; ++y) {
            for (int x = 0; x < dims[0]; ++x) {
                const VoxelFeatures f = voxel_features(image, x, y, z);
                const auto probs = class_probs(params.values, f);
                int best = 0;
                for (int c = 1; c < kVoxelClassCount; ++c) {
                    if (probs[c] > probs[best]) best = c;  // ties keep the lower class
                }
                labels[image.grid().index(x, y, z)] = kClassLabels[static_cast<std::size_t>(best)];
            }
        }
    }
    return LabelVolume(image.grid(), std::move(labels));
}

}  // namespace fedseg
