#include "fedseg/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "fedseg/errors.hpp"

namespace fedseg {

namespace {

constexpr char kMagic[8] = {'F', 'S', 'E', 'G', 'M', 'D', 'L', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void validate_params(const ModelParams& params) {
    if (params.wire_width < 1) throw ValidationError("wire_width must be >= 1");
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        if (!std::isfinite(params.values[i]))
            throw ValidationError("non-finite model parameter at index " + std::to_string(i));
    }
}

void save_model(const ModelParams& params, const std::filesystem::path& path) {
    validate_params(params);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(params.values.size()));
    put_u32(out, static_cast<std::uint32_t>(params.wire_width));
    for (const double v : params.values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
        out.write(b, 8);
    }
    if (!out) throw FormatError("write failed for " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0)
        throw FormatError(path.string() + ": not a model file");
    ModelParams params;
    const std::uint32_t count = get_u32(in);
    params.wire_width = static_cast<int>(get_u32(in));
    params.values.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        if (in.gcount() != 8) throw FormatError(path.string() + ": truncated model file");
        std::uint64_t bits = 0;
        for (int j = 0; j < 8; ++j) bits |= static_cast<std::uint64_t>(b[j]) << (8 * j);
        double v;
        std::memcpy(&v, &bits, 8);
        params.values[i] = v;
    }
    validate_params(params);
    return params;
}

}  // namespace fedseg
