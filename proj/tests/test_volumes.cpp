#include <doctest.h>

#include <fstream>

#include "fedseg/nifti.hpp"
#include "fedseg/volume.hpp"
#include "support/generators.hpp"

using namespace fedseg;

TEST_CASE("label volume invariants are enforced") {
    const Grid grid{{2, 2, 2}, {1.0f, 1.0f, 1.0f}};
    CHECK_NOTHROW(LabelVolume(grid, {0, 1, 2, 4, 0, 1, 2, 4}));
    CHECK_THROWS_AS(LabelVolume(grid, {0, 1, 2, 3, 0, 1, 2, 4}), ValidationError);   // 3 is not a label
    CHECK_THROWS_AS(LabelVolume(grid, {0, 1, 2}), ValidationError);                  // wrong length
    CHECK_THROWS_AS(LabelVolume({{0, 2, 2}, {1, 1, 1}}, {}), ValidationError);       // dims >= 1
    CHECK_THROWS_AS(LabelVolume({{2, 2, 2}, {1, 0.0f, 1}}, std::vector<std::uint8_t>(8, 0)), ValidationError);
}

TEST_CASE("region_mask follows the label-set mapping") {
    const Grid grid{{3, 1, 1}, {1.0f, 1.0f, 1.0f}};

    SUBCASE("all-zero volume gives an all-background mask for every region") {
        const auto vol = LabelVolume::filled(grid, 0);
        for (const Region region : kAllRegions) CHECK(region_mask(vol, region).foreground_count() == 0);
    }

    SUBCASE("WT covers exactly the voxels labeled 1, 2 or 4") {
        const LabelVolume vol(grid, {1, 2, 4});
        const auto wt = region_mask(vol, Region::WT);
        CHECK(wt.foreground_count() == 3);
        CHECK(wt.at(0, 0, 0));
        CHECK(wt.at(1, 0, 0));
        CHECK(wt.at(2, 0, 0));
    }

    SUBCASE("single voxel labeled 1 is background for TC under the default mapping") {
        const LabelVolume vol({{1, 1, 1}, {1, 1, 1}}, {1});
        CHECK(region_mask(vol, Region::TC).foreground_count() == 0);
    }

    SUBCASE("a configured mapping overrides the default") {
        const RegionMap custom({4}, {1, 4}, {1, 2, 4});  // TC as ET+NCR
        const LabelVolume vol(grid, {1, 2, 4});
        const auto tc = region_mask(vol, Region::TC, custom);
        CHECK(tc.at(0, 0, 0));
        CHECK_FALSE(tc.at(1, 0, 0));
        CHECK(tc.at(2, 0, 0));
    }
}

TEST_CASE("region masks nest ET within TC within WT on random volumes") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const Grid grid = testgen::random_grid(rng, 8);
        const LabelVolume vol = testgen::random_label_volume(rng, grid);
        const auto et = region_mask(vol, Region::ET);
        const auto tc = region_mask(vol, Region::TC);
        const auto wt = region_mask(vol, Region::WT);
        for (std::size_t i = 0; i < grid.voxel_count(); ++i) {
            if (et.data()[i]) CHECK(tc.data()[i]);
            if (tc.data()[i]) CHECK(wt.data()[i]);
        }
    }
}

TEST_CASE("masking a mask-as-labels reproduces it") {
    Rng rng(77);
    const Grid grid = testgen::random_grid(rng, 6);
    const LabelVolume vol = testgen::random_label_volume(rng, grid);
    for (const Region region : kAllRegions) {
        const BinaryMask mask = region_mask(vol, region);
        // re-encode the mask's foreground with a label of that region
        std::vector<std::uint8_t> relabeled(mask.data().size());
        const std::uint8_t label = RegionMap::challenge_default().labels(region).front();
        for (std::size_t i = 0; i < relabeled.size(); ++i) relabeled[i] = mask.data()[i] ? label : 0;
        const BinaryMask again = region_mask(LabelVolume(grid, relabeled), region);
        CHECK(again == mask);
    }
}

TEST_CASE("nifti round-trips preserve data and spacing") {
    testgen::TempDir tmp("nifti");

    SUBCASE("all-zero 4x4x4 label volume") {
        const auto vol = LabelVolume::filled({{4, 4, 4}, {1, 1, 1}}, 0);
        write_nifti(vol, tmp.path() / "zeros.nii");
        CHECK(read_label_volume(tmp.path() / "zeros.nii") == vol);
    }

    SUBCASE("random label volume") {
        Rng rng(5);
        const Grid grid = testgen::random_grid(rng, 7);
        const LabelVolume vol = testgen::random_label_volume(rng, grid);
        write_nifti(vol, tmp.path() / "random.nii");
        CHECK(read_label_volume(tmp.path() / "random.nii") == vol);
    }

    SUBCASE("anisotropic spacing is header-exact") {
        const auto vol = LabelVolume::filled({{3, 2, 5}, {1.0f, 2.0f, 0.5f}}, 4);
        write_nifti(vol, tmp.path() / "aniso.nii");
        const auto back = read_label_volume(tmp.path() / "aniso.nii");
        CHECK(back.spacing() == Spacing{1.0f, 2.0f, 0.5f});
        CHECK(back == vol);
    }

    SUBCASE("intensity volume round-trip") {
        Rng rng(6);
        const Grid grid = testgen::random_grid(rng, 6);
        std::vector<float> values(grid.voxel_count());
        for (auto& v : values) v = static_cast<float>(rng.normal());
        const IntensityVolume vol(grid, values);
        write_nifti(vol, tmp.path() / "img.nii");
        CHECK(read_intensity_volume(tmp.path() / "img.nii") == vol);
    }
}

TEST_CASE("read_nifti dispatches on datatype") {
    testgen::TempDir tmp("dispatch");
    write_nifti(LabelVolume::filled({{2, 2, 2}, {1, 1, 1}}, 2), tmp.path() / "labels.nii");
    write_nifti(IntensityVolume::filled({{2, 2, 2}, {1, 1, 1}}, 0.5f), tmp.path() / "image.nii");

    CHECK(std::holds_alternative<LabelVolume>(read_nifti(tmp.path() / "labels.nii")));
    CHECK(std::holds_alternative<IntensityVolume>(read_nifti(tmp.path() / "image.nii")));
    CHECK_THROWS_AS(read_label_volume(tmp.path() / "image.nii"), FormatError);
    // label volume read as intensities is allowed (uint8 converts)
    CHECK(read_intensity_volume(tmp.path() / "labels.nii").at(0, 0, 0) == 2.0f);
}

TEST_CASE("malformed nifti files are rejected") {
    testgen::TempDir tmp("badnifti");

    SUBCASE("wrong magic bytes") {
        const auto path = tmp.path() / "magic.nii";
        write_nifti(LabelVolume::filled({{2, 2, 2}, {1, 1, 1}}, 0), path);
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(344);
        f.write("oops", 4);
        f.close();
        CHECK_THROWS_AS(read_nifti_image(path), FormatError);
    }

    SUBCASE("uint8 voxel outside the label set") {
        NiftiImage img;
        img.grid = {{2, 2, 2}, {1, 1, 1}};
        img.datatype = NiftiDatatype::Uint8;
        img.data.assign(8, std::byte{0});
        img.data[3] = std::byte{3};
        const auto path = tmp.path() / "label3.nii";
        write_nifti_image(img, path);
        CHECK_THROWS_AS(read_nifti(path), ValidationError);
    }

    SUBCASE("truncated voxel data") {
        const auto path = tmp.path() / "trunc.nii";
        write_nifti(LabelVolume::filled({{4, 4, 4}, {1, 1, 1}}, 1), path);
        std::filesystem::resize_file(path, 352 + 10);
        CHECK_THROWS_AS(read_nifti_image(path), FormatError);
    }

    SUBCASE("not a nifti file at all") {
        const auto path = tmp.path() / "junk.nii";
        std::ofstream(path) << "definitely not nifti";
        CHECK_THROWS_AS(read_nifti_image(path), FormatError);
    }
}

TEST_CASE("raw nifti layer round-trips every supported datatype bit for bit") {
    testgen::TempDir tmp("raw");
    Rng rng(99);
    for (const auto dt : {NiftiDatatype::Uint8, NiftiDatatype::Int16, NiftiDatatype::Float32}) {
        NiftiImage img;
        img.grid = testgen::random_grid(rng, 6);
        img.datatype = dt;
        img.data.resize(img.grid.voxel_count() * static_cast<std::size_t>(nifti_bytes_per_voxel(dt)));
        for (auto& b : img.data) b = static_cast<std::byte>(rng.uniform_int(0, 3));  // labels stay valid
        const auto path = tmp.path() / "raw.nii";
        write_nifti_image(img, path);
        const NiftiImage back = read_nifti_image(path);
        CHECK(back.grid == img.grid);
        CHECK(back.datatype == img.datatype);
        CHECK(back.data == img.data);
    }
}
