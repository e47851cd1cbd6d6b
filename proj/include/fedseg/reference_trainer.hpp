#pragma once

#include <array>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fedseg/trainer.hpp"

namespace fedseg {

// Feature vector of one voxel: own intensity, mean intensity of the
// in-bounds 6-neighbors, normalized distance from the volume center, bias.
constexpr int kVoxelFeatureCount = 4;
// Output classes map to labels {0, 1, 2, 4}.
constexpr int kVoxelClassCount = 4;
constexpr int kReferenceParamCount = kVoxelClassCount * kVoxelFeatureCount;

constexpr std::array<std::uint8_t, kVoxelClassCount> kClassLabels{0, 1, 2, 4};
int class_index_for_label(std::uint8_t label);

using VoxelFeatures = std::array<double, kVoxelFeatureCount>;

VoxelFeatures voxel_features(const IntensityVolume& image, int x, int y, int z);

// Multinomial cross-entropy over a batch, for a row-major class x feature
// weight matrix. Exposed so the analytic gradient can be checked against
// finite differences.
double cross_entropy_loss(std::span<const double> weights, std::span<const VoxelFeatures> features,
                          std::span<const int> class_targets);
std::vector<double> cross_entropy_grad(std::span<const double> weights, std::span<const VoxelFeatures> features,
                                       std::span<const int> class_targets);

struct ReferenceTrainerOptions {
    int batch_size = 256;   // 0 = full batch
    double init_sd = 0.01;  // stddev of the seeded parameter init
    int wire_width = 4;
};

ReferenceTrainerOptions parse_reference_trainer_options(const nlohmann::json& params);

// Per-voxel multinomial linear classifier trained with mini-batch gradient
// descent on cross-entropy. Small on purpose: 16 parameters keep federation
// byte ledgers readable while the synthetic classes stay separable.
class ReferenceTrainer : public Trainer {
  public:
    explicit ReferenceTrainer(ReferenceTrainerOptions options = {}) : options_(options) {}

    ModelParams init_params(std::uint64_t seed) const override;
    ModelParams train(const ModelParams& params, const Dataset& train_set, int epochs, double lr,
                      std::uint64_t seed) const override;
    // mean DSC over ET/TC/WT of predictions on the validation split
    double validate(const ModelParams& params, const Dataset& val_set) const override;
    LabelVolume predict(const ModelParams& params, const IntensityVolume& image) const override;

  private:
    ReferenceTrainerOptions options_;
};

}  // namespace fedseg
