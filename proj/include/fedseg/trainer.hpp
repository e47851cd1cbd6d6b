#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fedseg/model.hpp"
#include "fedseg/volume.hpp"

namespace fedseg {

// One segmentation case: an intensity image and its label map on one grid.
struct Case {
    std::string id;
    IntensityVolume image;
    LabelVolume labels;
};

using Dataset = std::vector<Case>;

// Pluggable local-training contract. Implementations must be deterministic
// given their arguments and safe for concurrent const calls: the federation
// runs collaborators in parallel against one trainer instance.
class Trainer {
  public:
    virtual ~Trainer() = default;

    virtual ModelParams init_params(std::uint64_t seed) const = 0;
    virtual ModelParams train(const ModelParams& params, const Dataset& train_set, int epochs, double lr,
                              std::uint64_t seed) const = 0;
    // score in [0, 1] of `params` on the validation split
    virtual double validate(const ModelParams& params, const Dataset& val_set) const = 0;
    virtual LabelVolume predict(const ModelParams& params, const IntensityVolume& image) const = 0;
};

using TrainerFactory = std::function<std::unique_ptr<Trainer>(const nlohmann::json& params)>;

void register_trainer(const std::string& name, TrainerFactory factory);
std::unique_ptr<Trainer> make_trainer(const std::string& name, const nlohmann::json& params);
std::vector<std::string> registered_trainers();

}  // namespace fedseg
