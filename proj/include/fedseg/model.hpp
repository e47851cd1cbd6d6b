#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace fedseg {

// Flat parameter vector, the unit of federation exchange. `wire_width` is
// the accounted byte cost per parameter on the wire; the in-memory values
// stay double precision.
struct ModelParams {
    std::vector<double> values;
    int wire_width = 4;

    std::size_t size() const { return values.size(); }
    std::uint64_t wire_bytes() const { return values.size() * static_cast<std::uint64_t>(wire_width); }

    bool operator==(const ModelParams&) const = default;
};

// throws ValidationError on non-finite values or wire_width < 1
void validate_params(const ModelParams& params);

// Binary model file: magic, parameter count, wire width, float64
// little-endian values. Byte-stable for identical params.
void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace fedseg
