#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "aerosurvey/spatial.hpp"

using namespace aerosurvey;

namespace {

GridSpec small_grid(std::size_t rows, std::size_t cols) {
    GridSpec g;
    g.rows = rows;
    g.cols = cols;
    g.spacing = 10.0;
    return g;
}

}  // namespace

TEST_CASE("index_to_point follows row-major order") {
    const auto g = small_grid(3, 3);
    CHECK(index_to_point(g, 0) == Point2{0, 0});
    CHECK(index_to_point(g, 4) == Point2{10, 10});
    CHECK(index_to_point(g, 5) == Point2{20, 10});

    const GridSpec defaults;  // 30 x 25 at 10 m
    CHECK(defaults.size() == 750);
    CHECK(index_to_point(defaults, 749) == Point2{240, 290});

    CHECK_THROWS_AS(index_to_point(g, 9), std::out_of_range);
}

TEST_CASE("index_to_point and nearest_index are inverse") {
    GridSpec g = small_grid(7, 5);
    g.origin = {-12.5, 3.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(nearest_index(g, index_to_point(g, i)) == i);
        std::size_t j = 0;
        REQUIRE(on_grid_point(g, index_to_point(g, i), j));
        CHECK(j == i);
    }
    std::size_t j = 0;
    CHECK_FALSE(on_grid_point(g, {-12.5 + 5.0, 3.0}, j));
}

TEST_CASE("grid validation names the field") {
    GridSpec g;
    g.spacing = -1;
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("spacing"), std::invalid_argument);
    g = GridSpec{};
    g.rows = 0;
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("rows"), std::invalid_argument);
}

TEST_CASE("motion graph degrees") {
    const MotionGraph two(small_grid(2, 2));
    for (std::size_t g = 0; g < 4; ++g) CHECK(two.neighbors(g).size() == 3);

    const MotionGraph three(small_grid(3, 3));
    CHECK(three.neighbors(4).size() == 8);
    CHECK(three.neighbors(1).size() == 5);
    CHECK(three.neighbors(0).size() == 3);

    CHECK_THROWS_AS(MotionGraph(small_grid(1, 4)), std::invalid_argument);
}

TEST_CASE("motion graph is undirected with king-move edges") {
    const auto grid = small_grid(5, 6);
    const MotionGraph graph(grid);
    for (std::size_t a = 0; a < graph.size(); ++a) {
        for (std::size_t b : graph.neighbors(a)) {
            const auto nb = graph.neighbors(b);
            CHECK(std::find(nb.begin(), nb.end(), a) != nb.end());
            const double d = distance(index_to_point(grid, a), index_to_point(grid, b));
            const bool axial = std::abs(d - 10.0) < 1e-12;
            const bool diagonal = std::abs(d - 10.0 * std::sqrt(2.0)) < 1e-12;
            CHECK((axial || diagonal));
        }
    }
}

TEST_CASE("sample_path examples") {
    const std::vector<Waypoint> line{{0, 0}, {12, 0}};
    const auto a = sample_path(line, 5.0);
    REQUIRE(a.size() == 3);
    CHECK(a[1] == Point2{5, 0});
    CHECK(a[2] == Point2{10, 0});

    // 4 m out, turn, 1 m residual carried, sample 3 m from the start.
    const std::vector<Waypoint> back{{0, 0}, {4, 0}, {0, 0}};
    const auto b = sample_path(back, 5.0);
    REQUIRE(b.size() == 2);
    CHECK(b[0] == Point2{0, 0});
    CHECK(b[1].x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(b[1].y == 0.0);

    const std::vector<Waypoint> single{{7, 3}};
    const auto c = sample_path(single, 5.0);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Point2{7, 3});

    // exact multiple includes the end point
    const std::vector<Waypoint> ten{{0, 0}, {10, 0}};
    CHECK(sample_path(ten, 5.0).size() == 3);

    CHECK_THROWS_AS(sample_path(line, 0.0), std::invalid_argument);
}

TEST_CASE("sampler carries the residual across feeds") {
    PathSampler sampler(5.0);
    std::vector<Point2> out;
    const std::vector<Waypoint> first{{0, 0}, {7, 0}};
    const std::vector<Waypoint> second{{7, 0}, {7, 9}};
    sampler.feed(first, out);
    sampler.feed(second, out);
    REQUIRE(out.size() == 4);
    CHECK(out[2].x == doctest::Approx(7.0));
    CHECK(out[2].y == doctest::Approx(3.0));
    CHECK(out[3].y == doctest::Approx(8.0));
    CHECK(sampler.pending() == doctest::Approx(4.0));
}

TEST_CASE("sample spacing is exact along random polylines") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Waypoint> poly(6);
        for (auto& p : poly) p = {coord(rng), coord(rng)};
        const double delta = 3.7;
        const auto samples = sample_path(poly, delta);

        // arc-length position of each sample, by walking the polyline
        auto arclen = [&](Point2 s) {
            double acc = 0.0;
            double best = 1e300, where = 0.0;
            for (std::size_t i = 1; i < poly.size(); ++i) {
                const double len = distance(poly[i - 1], poly[i]);
                const double t =
                    len > 0 ? std::clamp(((s.x - poly[i - 1].x) * (poly[i].x - poly[i - 1].x) +
                                          (s.y - poly[i - 1].y) * (poly[i].y - poly[i - 1].y)) /
                                             (len * len),
                                         0.0, 1.0)
                            : 0.0;
                const Point2 q{poly[i - 1].x + t * (poly[i].x - poly[i - 1].x),
                               poly[i - 1].y + t * (poly[i].y - poly[i - 1].y)};
                const double d = distance(q, s);
                if (d < best - 1e-12) {
                    best = d;
                    where = acc + t * len;
                }
                acc += len;
            }
            return where;
        };
        CHECK(samples.size() == static_cast<std::size_t>(std::floor(path_length(poly) / delta + 1e-9)) + 1);
        for (std::size_t i = 0; i < samples.size(); ++i)
            CHECK(arclen(samples[i]) == doctest::Approx(delta * static_cast<double>(i)).epsilon(1e-9));
    }
}

TEST_CASE("travel_time") {
    const std::vector<Waypoint> a{{0, 0}, {30, 40}};
    CHECK(travel_time(a, 5.0) == doctest::Approx(10.0));
    const std::vector<Waypoint> b{{3, 3}};
    CHECK(travel_time(b, 5.0) == 0.0);
    const std::vector<Waypoint> c{{0, 0}, {10, 0}, {10, 10}};
    CHECK(travel_time(c, 1.0) == doctest::Approx(20.0));
    CHECK_THROWS_AS(travel_time(c, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(travel_time(c, -2.0), std::invalid_argument);
}
