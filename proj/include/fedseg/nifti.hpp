#pragma once

#include <cstddef>
#include <filesystem>
#include <variant>
#include <vector>

#include "fedseg/volume.hpp"

namespace fedseg {

// Supported subset of NIfTI-1: uncompressed single .nii file, little-endian,
// 348-byte header with magic "n+1\0", dim[0] = 3, voxel data at offset 352.
// Spatial metadata is pixdim[1..3] only; no affine, no scaling.
enum class NiftiDatatype : std::int16_t {
    Uint8 = 2,    // label volumes
    Int16 = 4,    // intensity volumes (integer-sampled)
    Float32 = 16  // intensity volumes
};

int nifti_bytes_per_voxel(NiftiDatatype dt);

// Untyped image as stored on disk; `data` holds raw little-endian voxels.
struct NiftiImage {
    Grid grid;
    NiftiDatatype datatype = NiftiDatatype::Uint8;
    std::vector<std::byte> data;
};

NiftiImage read_nifti_image(const std::filesystem::path& path);
void write_nifti_image(const NiftiImage& img, const std::filesystem::path& path);

// Typed layer. uint8 files are read as label volumes (label set validated);
// int16 and float32 files are read as intensity volumes.
std::variant<LabelVolume, IntensityVolume> read_nifti(const std::filesystem::path& path);
LabelVolume read_label_volume(const std::filesystem::path& path);
IntensityVolume read_intensity_volume(const std::filesystem::path& path);

void write_nifti(const LabelVolume& vol, const std::filesystem::path& path);
void write_nifti(const IntensityVolume& vol, const std::filesystem::path& path);

}  // namespace fedseg
