#include "fedseg/nifti.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

namespace fedseg {

namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;
constexpr char kMagic[4] = {'n', '+', '1', '\0'};

// field offsets within the 348-byte header
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;        // short dim[8]
constexpr std::size_t kOffDatatype = 70;   // short
constexpr std::size_t kOffBitpix = 72;     // short
constexpr std::size_t kOffPixdim = 76;     // float pixdim[8]
constexpr std::size_t kOffVoxOffset = 108; // float
constexpr std::size_t kOffSclSlope = 112;  // float
constexpr std::size_t kOffXyztUnits = 123; // char
constexpr std::size_t kOffMagic = 344;     // char[4]

// Serialization is explicit little-endian byte shuffling, independent of
// host struct layout.
void put_i16(std::vector<std::byte>& buf, std::size_t off, std::int16_t v) {
    buf[off] = static_cast<std::byte>(v & 0xff);
    buf[off + 1] = static_cast<std::byte>((v >> 8) & 0xff);
}

void put_i32(std::vector<std::byte>& buf, std::size_t off, std::int32_t v) {
    for (int i = 0; i < 4; ++i) buf[off + i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

void put_f32(std::vector<std::byte>& buf, std::size_t off, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i) buf[off + i] = static_cast<std::byte>((bits >> (8 * i)) & 0xff);
}

std::int16_t get_i16(const std::vector<std::byte>& buf, std::size_t off) {
    return static_cast<std::int16_t>(std::to_integer<std::uint16_t>(buf[off]) |
                                     (std::to_integer<std::uint16_t>(buf[off + 1]) << 8));
}

std::int32_t get_i32(const std::vector<std::byte>& buf, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(buf[off + i]) << (8 * i);
    return static_cast<std::int32_t>(v);
}

float get_f32(const std::vector<std::byte>& buf, std::size_t off) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= std::to_integer<std::uint32_t>(buf[off + i]) << (8 * i);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

NiftiDatatype datatype_from_code(std::int16_t code, const std::filesystem::path& path) {
    switch (code) {
        case 2: return NiftiDatatype::Uint8;
        case 4: return NiftiDatatype::Int16;
        case 16: return NiftiDatatype::Float32;
        default:
            throw FormatError(path.string() + ": unsupported NIfTI datatype code " + std::to_string(code) +
                              " (supported: 2 uint8, 4 int16, 16 float32)");
    }
}

}  // namespace

int nifti_bytes_per_voxel(NiftiDatatype dt) {
    switch (dt) {
        case NiftiDatatype::Uint8: return 1;
        case NiftiDatatype::Int16: return 2;
        case NiftiDatatype::Float32: return 4;
    }
    throw ValidationError("unknown NiftiDatatype");
}

NiftiImage read_nifti_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());

    std::vector<std::byte> header(kHeaderSize);
    in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(kHeaderSize));
    if (in.gcount() != static_cast<std::streamsize>(kHeaderSize))
        throw FormatError(path.string() + ": file shorter than a NIfTI-1 header");

    if (std::memcmp(&header[kOffMagic], kMagic, 4) != 0)
        throw FormatError(path.string() + ": bad magic bytes, not a single-file NIfTI-1 image");
    const std::int32_t sizeof_hdr = get_i32(header, kOffSizeofHdr);
    if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize))
        throw FormatError(path.string() + ": sizeof_hdr is " + std::to_string(sizeof_hdr) +
                          ", expected 348 (big-endian files are not supported)");

    const std::int16_t ndim = get_i16(header, kOffDim);
    if (ndim != 3)
        throw FormatError(path.string() + ": dim[0] is " + std::to_string(ndim) + ", expected a 3-D image");

    NiftiImage img;
    for (int axis = 0; axis < 3; ++axis) {
        const std::int16_t extent = get_i16(header, kOffDim + 2 * (axis + 1));
        if (extent < 1)
            throw FormatError(path.string() + ": non-positive extent on axis " + std::to_string(axis));
        img.grid.dims[axis] = extent;
        const float sp = get_f32(header, kOffPixdim + 4 * (axis + 1));
        if (!(sp > 0.0f) || !std::isfinite(sp))
            throw FormatError(path.string() + ": non-positive pixdim on axis " + std::to_string(axis));
        img.grid.spacing[axis] = sp;
    }

    img.datatype = datatype_from_code(get_i16(header, kOffDatatype), path);
    const std::int16_t bitpix = get_i16(header, kOffBitpix);
    if (bitpix != 8 * nifti_bytes_per_voxel(img.datatype))
        throw FormatError(path.string() + ": bitpix " + std::to_string(bitpix) + " inconsistent with datatype");

    const float vox_offset = get_f32(header, kOffVoxOffset);
    if (!(vox_offset >= static_cast<float>(kHeaderSize)))
        throw FormatError(path.string() + ": vox_offset " + std::to_string(vox_offset) + " below header size");

    const std::size_t n_bytes = img.grid.voxel_count() * static_cast<std::size_t>(nifti_bytes_per_voxel(img.datatype));
    img.data.resize(n_bytes);
    in.seekg(static_cast<std::streamoff>(vox_offset));
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(n_bytes));
    if (in.gcount() != static_cast<std::streamsize>(n_bytes))
        throw FormatError(path.string() + ": truncated voxel data, expected " + std::to_string(n_bytes) + " bytes");
    return img;
}

void write_nifti_image(const NiftiImage& img, const std::filesystem::path& path) {
    validate_grid(img.grid);
    const std::size_t n_bytes = img.grid.voxel_count() * static_cast<std::size_t>(nifti_bytes_per_voxel(img.datatype));
    if (img.data.size() != n_bytes)
        throw ValidationError("nifti image data size " + std::to_string(img.data.size()) +
                              " does not match dims/datatype (" + std::to_string(n_bytes) + ")");
    for (int axis = 0; axis < 3; ++axis) {
        if (img.grid.dims[axis] > std::numeric_limits<std::int16_t>::max())
            throw ValidationError("axis extent exceeds NIfTI-1 int16 dim field");
    }

    std::vector<std::byte> header(kVoxOffset, std::byte{0});  // header + 4 pad bytes
    put_i32(header, kOffSizeofHdr, static_cast<std::int32_t>(kHeaderSize));
    put_i16(header, kOffDim, 3);
    for (int axis = 0; axis < 3; ++axis)
        put_i16(header, kOffDim + 2 * (axis + 1), static_cast<std::int16_t>(img.grid.dims[axis]));
    for (std::size_t d = 4; d < 8; ++d) put_i16(header, kOffDim + 2 * d, 1);
    put_i16(header, kOffDatatype, static_cast<std::int16_t>(img.datatype));
    put_i16(header, kOffBitpix, static_cast<std::int16_t>(8 * nifti_bytes_per_voxel(img.datatype)));
    for (int axis = 0; axis < 3; ++axis)
        put_f32(header, kOffPixdim + 4 * (axis + 1), img.grid.spacing[axis]);
    put_f32(header, kOffVoxOffset, static_cast<float>(kVoxOffset));
    put_f32(header, kOffSclSlope, 1.0f);
    header[kOffXyztUnits] = std::byte{2};  // NIFTI_UNITS_MM
    std::memcpy(&header[kOffMagic], kMagic, 4);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!out) throw FormatError("write failed for " + path.string());
}

std::variant<LabelVolume, IntensityVolume> read_nifti(const std::filesystem::path& path) {
    const NiftiImage img = read_nifti_image(path);
    switch (img.datatype) {
        case NiftiDatatype::Uint8: {
            std::vector<std::uint8_t> labels(img.data.size());
            std::memcpy(labels.data(), img.data.data(), img.data.size());
            return LabelVolume(img.grid, std::move(labels));
        }
        case NiftiDatatype::Int16: {
            std::vector<float> values(img.grid.voxel_count());
            for (std::size_t i = 0; i < values.size(); ++i) {
                std::int16_t v;
                std::memcpy(&v, &img.data[2 * i], 2);
                values[i] = static_cast<float>(v);
            }
            return IntensityVolume(img.grid, std::move(values));
        }
        case NiftiDatatype::Float32: {
            std::vector<float> values(img.grid.voxel_count());
            std::memcpy(values.data(), img.data.data(), img.data.size());
            return IntensityVolume(img.grid, std::move(values));
        }
    }
    throw FormatError(path.string() + ": unreachable datatype");
}

LabelVolume read_label_volume(const std::filesystem::path& path) {
    auto v = read_nifti(path);
    if (auto* labels = std::get_if<LabelVolume>(&v)) return std::move(*labels);
    throw FormatError(path.string() + ": expected a uint8 label volume, file holds intensities");
}

IntensityVolume read_intensity_volume(const std::filesystem::path& path) {
    const NiftiImage img = read_nifti_image(path);
    if (img.datatype == NiftiDatatype::Uint8) {
        std::vector<float> values(img.grid.voxel_count());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = static_cast<float>(std::to_integer<std::uint8_t>(img.data[i]));
        return IntensityVolume(img.grid, std::move(values));
    }
    auto v = read_nifti(path);
    return std::get<IntensityVolume>(std::move(v));
}

void write_nifti(const LabelVolume& vol, const std::filesystem::path& path) {
    NiftiImage img;
    img.grid = vol.grid();
    img.datatype = NiftiDatatype::Uint8;
    img.data.resize(vol.data().size());
    std::memcpy(img.data.data(), vol.data().data(), vol.data().size());
    write_nifti_image(img, path);
}

void write_nifti(const IntensityVolume& vol, const std::filesystem::path& path) {
    NiftiImage img;
    img.grid = vol.grid();
    img.datatype = NiftiDatatype::Float32;
    img.data.resize(vol.data().size() * 4);
    std::memcpy(img.data.data(), vol.data().data(), img.data.size());
    write_nifti_image(img, path);
}

}  // namespace fedseg
