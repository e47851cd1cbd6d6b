#include "fedseg/trainer.hpp"

#include <map>

#include <nlohmann/json.hpp>

#include "fedseg/errors.hpp"
#include "fedseg/reference_trainer.hpp"

namespace fedseg {

namespace {

std::map<std::string, TrainerFactory>& trainer_map() {
    static std::map<std::string, TrainerFactory> map{
        {"reference",
         [](const nlohmann::json& params) -> std::unique_ptr<Trainer> {
             return std::make_unique<ReferenceTrainer>(parse_reference_trainer_options(params));
         }},
    };
    return map;
}

}  // namespace

void register_trainer(const std::string& name, TrainerFactory factory) {
    trainer_map()[name] = std::move(factory);
}

std::unique_ptr<Trainer> make_trainer(const std::string& name, const nlohmann::json& params) {
    const auto& map = trainer_map();
    const auto it = map.find(name);
    if (it == map.end()) {
        std::string known;
        for (const auto& [k, v] : map) known += (known.empty() ? "" : ", ") + k;
        throw ValidationError("unknown trainer '" + name + "'; registered trainers: " + known);
    }
    return it->second(params);
}

std::vector<std::string> registered_trainers() {
    std::vector<std::string> names;
    for (const auto& [k, v] : trainer_map()) names.push_back(k);
    return names;
}

}  // namespace fedseg
