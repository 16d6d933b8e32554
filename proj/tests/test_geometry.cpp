#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "error.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace rbffd;

namespace {

// O(N log N)-free oracles used to pin the spatial-index results.

std::vector<int> brute_knn(const std::vector<Point>& pts, const Point& q, int k) {
    std::vector<std::pair<double, int>> ranked(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) ranked[i] = {dist2(pts[i], q), static_cast<int>(i)};
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) out[i] = ranked[i].second;
    return out;
}

double brute_separation(const std::vector<Point>& pts) {
    double min_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            min_d2 = std::min(min_d2, dist2(pts[i], pts[j]));
    return 0.5 * std::sqrt(min_d2);
}

double brute_fill(const NodeSet& nodes, int resolution) {
    double best = 0.0;
    const Rect& r = nodes.domain;
    for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i) {
            const Point q{r.x0 + r.width() * i / (resolution - 1),
                          r.y0 + r.height() * j / (resolution - 1)};
            double nn = std::numeric_limits<double>::infinity();
            for (const Point& p : nodes.points) nn = std::min(nn, dist2(p, q));
            best = std::max(best, nn);
        }
    return std::sqrt(best);
}

NodeSet random_nodes(std::mt19937_64& rng, int n, const Rect& domain = {0, 0, 1, 1}) {
    std::uniform_real_distribution<double> ux(domain.x0, domain.x1);
    std::uniform_real_distribution<double> uy(domain.y0, domain.y1);
    NodeSet ns;
    ns.domain = domain;
    for (int i = 0; i < n; ++i) {
        ns.points.push_back({ux(rng), uy(rng)});
        ns.segment.push_back(kInteriorSegment);
    }
    return ns;
}

NodeSet cell_centered_grid(int m, const Rect& domain = {0, 0, 1, 1}) {
    NodeSet ns;
    ns.domain = domain;
    const double hx = domain.width() / m;
    const double hy = domain.height() / m;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            ns.points.push_back({domain.x0 + (i + 0.5) * hx, domain.y0 + (j + 0.5) * hy});
            ns.segment.push_back(kInteriorSegment);
        }
    return ns;
}

} // namespace

TEST_CASE("fill distance: single centered node") {
    NodeSet ns;
    ns.domain = {0, 0, 1, 1};
    ns.points = {{0.5, 0.5}};
    ns.segment = {kInteriorSegment};
    CHECK(fill_distance(ns, 201) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-2));
}

TEST_CASE("fill distance: cell-centered grid against a finer brute-force grid") {
    const int m = 8;
    NodeSet ns = cell_centered_grid(m);
    const double h = 1.0 / m;
    const double value = fill_distance(ns, 161);
    CHECK(value == doctest::Approx(h / std::sqrt(2.0)).epsilon(0.05));
    CHECK(value == doctest::Approx(brute_fill(ns, 161)).epsilon(1e-12));
}

TEST_CASE("fill distance decreases when the witness point becomes a node") {
    std::mt19937_64 rng(7);
    NodeSet ns = random_nodes(rng, 40);
    const FillDistanceResult before = fill_distance_detail(ns, 101);
    ns.points.push_back(before.witness);
    ns.segment.push_back(kInteriorSegment);
    CHECK(fill_distance(ns, 101) < before.value);
}

TEST_CASE("fill distance errors") {
    NodeSet empty;
    empty.domain = {0, 0, 1, 1};
    CHECK_THROWS_WITH_AS(fill_distance(empty), "empty node set", Error);
    NodeSet one;
    one.domain = {0, 0, 1, 1};
    one.points = {{0.5, 0.5}};
    one.segment = {kInteriorSegment};
    CHECK_THROWS_AS(fill_distance(one, 1), Error);
}

TEST_CASE("separation distance") {
    NodeSet two;
    two.domain = {-1, -1, 2, 2};
    two.points = {{0, 0}, {1, 0}};
    two.segment = {kInteriorSegment, kInteriorSegment};
    CHECK(separation_distance(two) == doctest::Approx(0.5));

    NodeSet grid = cell_centered_grid(6);
    CHECK(separation_distance(grid) == doctest::Approx(0.5 / 6.0));

    std::mt19937_64 rng(11);
    NodeSet rnd = random_nodes(rng, 50);
    CHECK(separation_distance(rnd) == brute_separation(rnd.points));

    NodeSet one;
    one.domain = {0, 0, 1, 1};
    one.points = {{0.5, 0.5}};
    one.segment = {kInteriorSegment};
    CHECK_THROWS_AS(separation_distance(one), Error);
}

TEST_CASE("mesh ratio") {
    NodeSet grid = cell_centered_grid(10);
    CHECK(mesh_ratio(grid, 201) == doctest::Approx(std::sqrt(2.0)).epsilon(0.10));

    // two clusters: 49 points packed in a corner plus one far away
    std::mt19937_64 rng(3);
    NodeSet clustered = random_nodes(rng, 49, {0, 0, 1, 1});
    for (auto& p : clustered.points) {
        p.x *= 0.1;
        p.y *= 0.1;
    }
    clustered.points.push_back({1.0, 1.0});
    clustered.segment.push_back(kInteriorSegment);
    CHECK(mesh_ratio(clustered, 201) > 10.0);
}

TEST_CASE("effective fill distance") {
    CHECK(effective_fill_distance(4.0, 2500, 2) == doctest::Approx(0.04));
    CHECK(effective_fill_distance(1.0, 1, 2) == doctest::Approx(1.0));
    CHECK(effective_fill_distance(1.0, 100, 1) == doctest::Approx(0.01));
    CHECK_THROWS_AS(effective_fill_distance(-1.0, 10, 2), Error);
    CHECK_THROWS_AS(effective_fill_distance(1.0, 0, 2), Error);
    CHECK_THROWS_AS(effective_fill_distance(1.0, 10, 4), Error);
}

TEST_CASE("knn basics and tie-breaking") {
    const double h = 0.25;
    std::vector<Point> cross = {{0, 0}, {h, 0}, {-h, 0}, {0, h}, {0, -h}};
    SpatialIndex index(cross);

    const auto self = index.knn({h, 0}, 1);
    CHECK(self[0] == 1);
    CHECK(index.nearest_distance({h, 0}) == 0.0);

    // all four arms tie at distance h: expect index order after the center
    const auto five = index.knn({0, 0}, 5);
    CHECK(five == std::vector<int>{0, 1, 2, 3, 4});

    CHECK_THROWS_WITH_AS(index.knn({0, 0}, 6), "stencil larger than node set", Error);
}

TEST_CASE("knn matches brute force on random instances") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<int> size_dist(5, 300);
        const int n = size_dist(rng);
        NodeSet ns = random_nodes(rng, n);
        SpatialIndex index(ns.points);
        std::uniform_int_distribution<int> k_dist(1, std::min(n, 25));
        std::uniform_real_distribution<double> coord(-0.2, 1.2);
        const Point q{coord(rng), coord(rng)};
        const int k = k_dist(rng);
        CHECK(index.knn(q, k) == brute_knn(ns.points, q, k));
    }
}

TEST_CASE("local fill distance") {
    const double h = 0.3;
    std::vector<Point> cross = {{0, 0}, {h, 0}, {-h, 0}, {0, h}, {0, -h}};
    CHECK(local_fill_distance(cross) == doctest::Approx(h));

    std::vector<Point> line = {{0, 0}, {h, 0}, {3 * h, 0}};
    CHECK(local_fill_distance(line) == doctest::Approx(2 * h));

    std::mt19937_64 rng(23);
    NodeSet rnd = random_nodes(rng, 13);
    double expected = 0.0;
    for (std::size_t i = 0; i < rnd.points.size(); ++i) {
        double nn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < rnd.points.size(); ++j)
            if (i != j) nn = std::min(nn, dist(rnd.points[i], rnd.points[j]));
        expected = std::max(expected, nn);
    }
    CHECK(local_fill_distance(rnd.points) == expected);

    std::vector<Point> single = {{0, 0}};
    CHECK_THROWS_AS(local_fill_distance(single), Error);
}

TEST_CASE("tensor grid generator") {
    NodeSet ns = generate_nodes({NodeKind::tensor_grid, 25, {-1, -1, 1, 1}});
    REQUIRE(ns.size() == 25);
    ns.validate();
    CHECK(ns.interior_count() == 9);
    // spacing 0.5 along each axis
    std::vector<double> xs;
    for (const auto& p : ns.points) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    REQUIRE(xs.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(xs[i] == doctest::Approx(-1.0 + 0.5 * i));
}

TEST_CASE("sine squash maps the lattice as sin(pi z / 2)") {
    NodeSet ns = generate_nodes({NodeKind::sine_squash, 25, {-1, -1, 1, 1}});
    REQUIRE(ns.size() == 25);
    ns.validate();
    std::vector<double> xs;
    for (const auto& p : ns.points) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    REQUIRE(xs.size() == 5);
    CHECK(xs[0] == -1.0);
    CHECK(xs[1] == doctest::Approx(-std::sqrt(2.0) / 2.0));
    CHECK(xs[2] == doctest::Approx(0.0));
    CHECK(xs[3] == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK(xs[4] == 1.0);
}

TEST_CASE("sine squash keeps the node count and raises the mesh ratio") {
    NodeSet grid = generate_nodes({NodeKind::tensor_grid, 400, {-1, -1, 1, 1}});
    NodeSet squashed = generate_nodes({NodeKind::sine_squash, 400, {-1, -1, 1, 1}});
    CHECK(squashed.size() == grid.size());
    squashed.validate();
    CHECK(mesh_ratio(squashed, 201) > mesh_ratio(grid, 201));
}

TEST_CASE("halton generator hits the target count exactly") {
    for (int n : {100, 500, 1000}) {
        NodeSet ns = generate_nodes({NodeKind::halton, n, {-1, -1, 1, 1}, {}, 5});
        CHECK(static_cast<int>(ns.size()) == n);
        ns.validate();
        CHECK(ns.interior_count() < ns.size());
    }
}

TEST_CASE("peak-adapted generator: size, spacing bound, density contrast") {
    GeneratorSpec spec;
    spec.kind = NodeKind::peak_adapted;
    spec.n_target = 600;
    spec.domain = {0, 0, 1, 1};
    spec.peak = PeakParams{{0.5, 0.5}, 0.01, 0.05, 0.25};
    spec.seed = 42;
    PeakCalibration calib;
    NodeSet ns = generate_nodes(spec, &calib);
    ns.validate();
    CHECK(std::abs(static_cast<double>(ns.size()) - spec.n_target) <= 0.15 * spec.n_target);

    // post-hoc pairwise check: min distance >= 0.8 * local spacing function
    auto radius_at = [&](const Point& p) {
        const double t = std::min(1.0, dist(p, spec.peak->peak) / spec.peak->radius);
        return calib.r_min + (calib.r_max - calib.r_min) * t;
    };
    SpatialIndex index(ns.points);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto two = index.knn(ns.points[i], 2);
        const double nn = dist(ns.points[two[0]], ns.points[two[1]]);
        CHECK(nn >= 0.8 * radius_at(ns.points[i]));
    }

    // node density inside the half-radius disk strictly exceeds the outside
    const double r_half = 0.5 * spec.peak->radius;
    std::size_t inside = 0;
    for (const auto& p : ns.points)
        if (dist(p, spec.peak->peak) <= r_half) ++inside;
    const double area_inside = std::numbers::pi * r_half * r_half;
    const double density_inside = inside / area_inside;
    const double density_outside = (ns.size() - inside) / (1.0 - area_inside);
    CHECK(density_inside > density_outside);
}

TEST_CASE("peak-adapted generator requires params") {
    GeneratorSpec spec;
    spec.kind = NodeKind::peak_adapted;
    spec.n_target = 100;
    spec.domain = {0, 0, 1, 1};
    CHECK_THROWS_WITH_AS(generate_nodes(spec), "params missing for peak-adapted generator",
                         Error);
}

TEST_CASE("generated sets satisfy the mesh-ratio slack bound") {
    for (NodeKind kind :
         {NodeKind::tensor_grid, NodeKind::halton, NodeKind::sine_squash}) {
        NodeSet ns = generate_nodes({kind, 400, {-1, -1, 1, 1}, {}, 9});
        CHECK(fill_distance(ns, 201) >= 0.9 * separation_distance(ns));
    }
}

TEST_CASE("boundary nodes lie exactly on the rectangle edges") {
    for (NodeKind kind :
         {NodeKind::tensor_grid, NodeKind::halton, NodeKind::sine_squash}) {
        NodeSet ns = generate_nodes({kind, 200, {-1, -1, 1, 1}, {}, 1});
        for (std::size_t i = 0; i < ns.size(); ++i)
            if (ns.is_boundary(i)) CHECK(on_segment(ns.domain, ns.points[i], ns.segment[i]));
    }
}

TEST_CASE("node CSV round trip") {
    NodeSet ns = generate_nodes({NodeKind::halton, 120, {-1, -1, 1, 1}, {}, 3});
    std::stringstream buffer;
    save_nodes_csv(ns, buffer);
    NodeSet back = load_nodes_csv(buffer, ns.domain);
    REQUIRE(back.size() == ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        CHECK(back.points[i].x == ns.points[i].x);
        CHECK(back.points[i].y == ns.points[i].y);
        CHECK(back.segment[i] == ns.segment[i]);
    }
}

TEST_CASE("node CSV rejects malformed input") {
    {
        std::stringstream bad("a,b\n");
        CHECK_THROWS_AS(load_nodes_csv(bad, Rect{0, 0, 1, 1}), Error);
    }
    {
        std::stringstream bad("x,y,role,segment\n0.5,0.5,queen,-1\n");
        CHECK_THROWS_AS(load_nodes_csv(bad, Rect{0, 0, 1, 1}), Error);
    }
    {
        // boundary tag not on an edge must fail validation
        std::stringstream bad("x,y,role,segment\n0.5,0.5,boundary,0\n");
        CHECK_THROWS_AS(load_nodes_csv(bad, Rect{0, 0, 1, 1}), Error);
    }
}

TEST_CASE("validate rejects coincident nodes") {
    NodeSet ns;
    ns.domain = {0, 0, 1, 1};
    ns.points = {{0.5, 0.5}, {0.5, 0.5}, {0.25, 0.25}};
    ns.segment = {kInteriorSegment, kInteriorSegment, kInteriorSegment};
    CHECK_THROWS_AS(ns.validate(), Error);
}
