#pragma once

#include <stdexcept>
#include <string>

namespace fedseg {

// Bad user input: configs, CLI arguments, malformed domain values.
// The CLI maps this to exit code 1.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or unsupported file contents.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A plugged-in component (trainer, strategy) broke its interface contract.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// A federated round ended with no usable updates.
struct RoundFailedError : std::runtime_error {
    explicit RoundFailedError(int round, const std::string& what)
        : std::runtime_error(what), round(round) {}
    int round;
};

}  // namespace fedseg
