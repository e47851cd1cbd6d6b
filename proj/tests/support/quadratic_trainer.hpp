#pragma once

// Trainer with an analytically tractable per-voxel quadratic loss, used to
// verify the pooled-equivalence property of federated averaging: with one
// full-batch step per round, the sample-weighted average of local steps
// must equal the full-batch step on the pooled data.
//
// Each voxel v contributes 0.5 * ||theta - g(v)||^2 with g(v) = intensity(v) * u
// for a fixed direction u, so grad = theta - mean_intensity * u.

#include <array>
#include <cmath>

#include "fedseg/trainer.hpp"

namespace testsupport {

class QuadraticTrainer : public fedseg::Trainer {
  public:
    explicit QuadraticTrainer(int param_count, double lr_scale = 1.0)
        : param_count_(param_count), lr_scale_(lr_scale) {}

    fedseg::ModelParams init_params(std::uint64_t seed) const override {
        fedseg::ModelParams params;
        params.values.assign(static_cast<std::size_t>(param_count_), 0.25 + 1e-9 * static_cast<double>(seed % 7));
        return params;
    }

    fedseg::ModelParams train(const fedseg::ModelParams& params, const fedseg::Dataset& train_set, int epochs,
                              double lr, std::uint64_t) const override {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& c : train_set) {
            for (const float v : c.image.data()) sum += v;
            count += c.image.data().size();
        }
        const double mean_intensity = sum / static_cast<double>(count);

        fedseg::ModelParams out = params;
        for (int step = 0; step < epochs; ++step) {
            for (std::size_t i = 0; i < out.values.size(); ++i) {
                const double target = mean_intensity * direction(i);
                out.values[i] -= lr * lr_scale_ * (out.values[i] - target);
            }
        }
        return out;
    }

    double validate(const fedseg::ModelParams&, const fedseg::Dataset&) const override { return 0.5; }

    fedseg::LabelVolume predict(const fedseg::ModelParams&, const fedseg::IntensityVolume& image) const override {
        return fedseg::LabelVolume::filled(image.grid(), 0);
    }

    double direction(std::size_t i) const { return 1.0 + static_cast<double>(i) / param_count_; }

  private:
    int param_count_;
    double lr_scale_;
};

}  // namespace testsupport
