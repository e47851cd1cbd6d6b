#include <doctest.h>

#include <cmath>

#include "fedseg/metrics.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace fedseg;

namespace {

BinaryMask mask_from_indices(const Grid& grid, const std::vector<std::array<int, 3>>& voxels) {
    std::vector<std::uint8_t> data(grid.voxel_count(), 0);
    for (const auto& [x, y, z] : voxels) data[grid.index(x, y, z)] = 1;
    return BinaryMask(grid, std::move(data));
}

}  // namespace

TEST_CASE("dice matches hand-counted fixtures") {
    const Grid grid{{3, 3, 3}, {1, 1, 1}};

    SUBCASE("identical non-empty masks score 1") {
        const auto m = mask_from_indices(grid, {{0, 0, 0}, {1, 1, 1}});
        const auto v = dice(m, m);
        CHECK(v.value == 1.0);
        CHECK_FALSE(v.degenerate);
    }

    SUBCASE("disjoint non-empty masks score 0") {
        const auto a = mask_from_indices(grid, {{0, 0, 0}});
        const auto b = mask_from_indices(grid, {{2, 2, 2}});
        CHECK(dice(a, b).value == 0.0);
    }

    SUBCASE("|PM|=2, |GT|=1, one-voxel overlap scores 2/3") {
        const auto pm = mask_from_indices(grid, {{0, 0, 0}, {1, 0, 0}});
        const auto gt = mask_from_indices(grid, {{0, 0, 0}});
        CHECK(dice(pm, gt).value == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(dice(pm, gt).value == oracle::dice_by_counting(pm, gt));
    }

    SUBCASE("both empty is a degenerate 1.0") {
        const auto e = BinaryMask::empty(grid);
        const auto v = dice(e, e);
        CHECK(v.value == 1.0);
        CHECK(v.degenerate);
    }

    SUBCASE("grid mismatch is an error") {
        const auto a = BinaryMask::empty(grid);
        const auto b = BinaryMask::empty({{3, 3, 3}, {2, 1, 1}});
        CHECK_THROWS_AS(dice(a, b), ValidationError);
    }
}

TEST_CASE("surface extraction follows the 6-neighbor contour rule") {
    SUBCASE("a single foreground voxel is its own surface") {
        const Grid grid{{3, 3, 3}, {1, 1, 1}};
        const auto m = mask_from_indices(grid, {{1, 1, 1}});
        const auto surf = surface_voxels(m);
        REQUIRE(surf.size() == 1);
        CHECK(surf[0].x == 1.0);
        CHECK(surf[0].y == 1.0);
        CHECK(surf[0].z == 1.0);
    }

    SUBCASE("the interior voxel of a solid 3x3x3 block is excluded") {
        const Grid grid{{5, 5, 5}, {1, 1, 1}};
        std::vector<std::array<int, 3>> voxels;
        for (int z = 1; z <= 3; ++z)
            for (int y = 1; y <= 3; ++y)
                for (int x = 1; x <= 3; ++x) voxels.push_back({x, y, z});
        const auto surf = surface_voxels(mask_from_indices(grid, voxels));
        CHECK(surf.size() == 26);  // all shell voxels, center (2,2,2) excluded
        for (const auto& p : surf) CHECK((p.x != 2.0 || p.y != 2.0 || p.z != 2.0));
    }

    SUBCASE("volume-boundary foreground voxels are surface even when fully surrounded in-bounds") {
        const Grid grid{{2, 2, 2}, {1, 1, 1}};
        const auto m = BinaryMask(grid, std::vector<std::uint8_t>(8, 1));
        CHECK(surface_voxels(m).size() == 8);
    }

    SUBCASE("empty mask has an empty surface") {
        CHECK(surface_voxels(BinaryMask::empty({{4, 4, 4}, {1, 1, 1}})).empty());
    }

    SUBCASE("coordinates scale with spacing") {
        const Grid grid{{3, 3, 3}, {2.0f, 0.5f, 1.0f}};
        const auto surf = surface_voxels(mask_from_indices(grid, {{2, 1, 1}}));
        REQUIRE(surf.size() == 1);
        CHECK(surf[0].x == 4.0);
        CHECK(surf[0].y == 0.5);
        CHECK(surf[0].z == 1.0);
    }
}

TEST_CASE("directed percentile distance uses the nearest-rank convention") {
    SUBCASE("identical sets give zero at any percentile") {
        const SurfacePointSet a{{0, 0, 0}, {1, 2, 3}, {4, 4, 4}};
        CHECK(directed_percentile_distance(a, a, 95.0) == 0.0);
        CHECK(directed_percentile_distance(a, a, 50.0) == 0.0);
    }

    SUBCASE("singleton sets reduce to the point distance") {
        CHECK(directed_percentile_distance({{0, 0, 0}}, {{3, 0, 0}}, 95.0) == 3.0);
    }

    SUBCASE("100 points at distances 1..100 give exactly 95 at p=95") {
        SurfacePointSet from, to{{0, 0, 0}};
        for (int i = 1; i <= 100; ++i) from.push_back({static_cast<double>(i), 0, 0});
        CHECK(directed_percentile_distance(from, to, 95.0) == 95.0);
        CHECK(directed_percentile_distance(from, to, 100.0) == 100.0);
        CHECK(directed_percentile_distance(from, to, 50.0) == 50.0);
        CHECK(directed_percentile_distance(from, to, 1.0) == 1.0);
    }

    SUBCASE("empty sets are rejected") {
        CHECK_THROWS_AS(directed_percentile_distance({}, {{0, 0, 0}}, 95.0), ValidationError);
        CHECK_THROWS_AS(directed_percentile_distance({{0, 0, 0}}, {}, 95.0), ValidationError);
    }

    SUBCASE("percentile is monotone in p on a fixed pair") {
        Rng rng(11);
        SurfacePointSet a, b;
        for (int i = 0; i < 40; ++i) {
            a.push_back({rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)});
            b.push_back({rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)});
        }
        const double p50 = directed_percentile_distance(a, b, 50.0);
        const double p95 = directed_percentile_distance(a, b, 95.0);
        const double p100 = directed_percentile_distance(a, b, 100.0);
        CHECK(p50 <= p95);
        CHECK(p95 <= p100);
    }
}

TEST_CASE("hd95 fixtures and edge policies") {
    const Grid grid{{5, 5, 5}, {1, 1, 1}};

    SUBCASE("identical non-empty masks score 0") {
        const auto m = mask_from_indices(grid, {{1, 1, 1}, {2, 1, 1}});
        const auto v = hd95(m, m);
        CHECK(v.value == 0.0);
        CHECK_FALSE(v.degenerate);
    }

    SUBCASE("singleton masks four voxels apart score 4") {
        const auto pm = mask_from_indices(grid, {{0, 0, 0}});
        const auto gt = mask_from_indices(grid, {{4, 0, 0}});
        CHECK(hd95(pm, gt).value == 4.0);
    }

    SUBCASE("both empty is a degenerate 0") {
        const auto v = hd95(BinaryMask::empty(grid), BinaryMask::empty(grid));
        CHECK(v.value == 0.0);
        CHECK(v.degenerate);
    }

    SUBCASE("one empty gets the default penalty: the physical diagonal") {
        const auto v = hd95(BinaryMask::empty(grid), mask_from_indices(grid, {{2, 2, 2}}));
        CHECK(v.degenerate);
        CHECK(v.value == physical_diagonal(grid));
        CHECK(physical_diagonal(grid) == doctest::Approx(std::sqrt(75.0)).epsilon(1e-15));
    }

    SUBCASE("one empty honors a configured penalty") {
        Hd95Options options;
        options.empty_penalty = 123.5;
        const auto v = hd95(mask_from_indices(grid, {{0, 0, 0}}), BinaryMask::empty(grid), options);
        CHECK(v.value == 123.5);
        CHECK(v.degenerate);
    }
}

TEST_CASE("dice and hd95 are symmetric on random masks") {
    Rng rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        const Grid grid = testgen::random_grid(rng, 9);
        const auto a = testgen::random_mask(rng, grid, rng.uniform(0.0, 0.5));
        const auto b = testgen::random_mask(rng, grid, rng.uniform(0.0, 0.5));
        CHECK(dice(a, b).value == dice(b, a).value);
        CHECK(hd95(a, b).value == hd95(b, a).value);
    }
}

TEST_CASE("hd95 and dice match the brute-force oracle on random masks") {
    Rng rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        const Grid grid = testgen::random_grid(rng, 10);
        const auto a = testgen::random_mask(rng, grid, rng.uniform(0.05, 0.6));
        const auto b = testgen::random_mask(rng, grid, rng.uniform(0.05, 0.6));
        CHECK(std::abs(dice(a, b).value - oracle::dice_by_counting(a, b)) <= 1e-12);
        const double expected = oracle::hd95_all_pairs(a, b, physical_diagonal(grid));
        CHECK(std::abs(hd95(a, b).value - expected) <= 1e-9);
    }
}

TEST_CASE("scaling all spacings scales hd95 and leaves dice unchanged") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        Grid grid = testgen::random_grid(rng, 8, /*mixed_spacing=*/false);
        const auto a = testgen::random_mask(rng, grid, 0.3);
        const auto b = testgen::random_mask(rng, grid, 0.3);
        const double s = 3.0;
        Grid scaled = grid;
        for (auto& sp : scaled.spacing) sp *= s;
        const BinaryMask as(scaled, a.data());
        const BinaryMask bs(scaled, b.data());
        CHECK(dice(as, bs).value == dice(a, b).value);
        if (a.foreground_count() > 0 && b.foreground_count() > 0)
            CHECK(hd95(as, bs).value == doctest::Approx(s * hd95(a, b).value).epsilon(1e-12));
    }
}
