#include <doctest.h>

#include "flowseg/sampler.hpp"

using namespace flowseg;

TEST_CASE("sample_grid 9x9 s=3 yields the 1/9 lattice") {
    SamplePointSet set = sample_grid(9, 9, 3);
    REQUIRE(set.size() == 9);
    int i = 0;
    for (int y : {1, 4, 7})
        for (int x : {1, 4, 7}) {
            CHECK(set.points[i].x == x);
            CHECK(set.points[i].y == y);
            CHECK(set.points[i].id == i);
            ++i;
        }
}

TEST_CASE("sample_grid s=1 samples every pixel") {
    CHECK(sample_grid(13, 7, 1).size() == 13u * 7u);
}

TEST_CASE("sample_grid tiny image keeps the offset point") {
    SamplePointSet set = sample_grid(2, 2, 3);
    REQUIRE(set.size() == 1);
    CHECK(set.points[0].x == 1);
    CHECK(set.points[0].y == 1);
}

TEST_CASE("sample_grid rejects zero interval") {
    CHECK_THROWS_AS(sample_grid(10, 10, 0), ZeroInterval);
}

TEST_CASE("restrict_to_foreground basics") {
    SamplePointSet grid = sample_grid(9, 9, 3);
    FlowField flow(9, 9);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            flow.u(x, y) = static_cast<float>(x);
            flow.v(x, y) = static_cast<float>(-y);
        }

    SUBCASE("all-background mask yields empty set") {
        Mask bg(9, 9, 0);
        CHECK(restrict_to_foreground(grid, bg, flow).size() == 0);
    }

    SUBCASE("all-foreground keeps every point and attaches flow") {
        Mask fg(9, 9, 255);
        SamplePointSet out = restrict_to_foreground(grid, fg, flow);
        REQUIRE(out.size() == grid.size());
        for (const SamplePoint& p : out.points) {
            CHECK(p.u == static_cast<float>(p.x));
            CHECK(p.v == static_cast<float>(-p.y));
        }
    }

    SUBCASE("dimension mismatch is rejected") {
        Mask small(4, 4, 255);
        CHECK_THROWS_AS(restrict_to_foreground(grid, small, flow), DimensionMismatch);
    }
}

TEST_CASE("restriction to a rectangle matches a brute-force pixel scan") {
    const int w = 64, h = 48, s = 3;
    Mask mask(w, h, 0);
    for (int y = 11; y < 21; ++y)
        for (int x = 17; x < 37; ++x) mask.label(x, y) = 255;  // 20x10 rectangle
    CHECK(mask.foreground_count() == 200);

    FlowField flow(w, h);
    SamplePointSet out = restrict_to_foreground(sample_grid(w, h, s), mask, flow);

    size_t brute = 0;
    for (int y = s / 2; y < h; y += s)
        for (int x = s / 2; x < w; x += s)
            if (mask.is_foreground(x, y)) ++brute;
    CHECK(out.size() == brute);
    CHECK(brute > 0);
}

TEST_CASE("restriction is idempotent and ids are dense") {
    const int w = 30, h = 30;
    Mask mask(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x + y) % 4 == 0) mask.label(x, y) = 255;
    FlowField flow(w, h);
    SamplePointSet once = restrict_to_foreground(sample_grid(w, h, 3), mask, flow);
    SamplePointSet twice = restrict_to_foreground(once, mask, flow);
    REQUIRE(once.size() == twice.size());
    for (size_t i = 0; i < once.size(); ++i) {
        CHECK(once.points[i].x == twice.points[i].x);
        CHECK(once.points[i].id == static_cast<int>(i));
    }
}
