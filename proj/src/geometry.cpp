#include "geometry.hpp"

#include "error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

namespace rbffd {

namespace {

double axis_coord(const Point& p, int axis) { return axis == 0 ? p.x : p.y; }

void require(bool ok, errc code, const std::string& msg) {
    if (!ok) throw Error(code, msg);
}

} // namespace

Point outward_normal(int segment) {
    switch (segment) {
    case 0: return {0.0, -1.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, 1.0};
    case 3: return {-1.0, 0.0};
    default: throw Error(errc::invalid_argument, "invalid boundary segment id");
    }
}

bool on_segment(const Rect& domain, const Point& p, int segment, double tol) {
    switch (segment) {
    case 0: return std::abs(p.y - domain.y0) <= tol;
    case 1: return std::abs(p.x - domain.x1) <= tol;
    case 2: return std::abs(p.y - domain.y1) <= tol;
    case 3: return std::abs(p.x - domain.x0) <= tol;
    default: return false;
    }
}

std::size_t NodeSet::interior_count() const {
    std::size_t n = 0;
    for (int s : segment)
        if (s == kInteriorSegment) ++n;
    return n;
}

void NodeSet::validate() const {
    require(!points.empty(), errc::invalid_argument, "empty node set");
    require(points.size() == segment.size(), errc::invalid_argument,
            "points/segment size mismatch");
    require(domain.width() > 0 && domain.height() > 0, errc::invalid_argument,
            "degenerate domain rectangle");
    const double tol = 1e-12 * std::max(1.0, std::max(domain.width(), domain.height()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        require(domain.contains(points[i], tol), errc::invalid_argument,
                "node outside the domain rectangle");
        const int seg = segment[i];
        if (seg != kInteriorSegment) {
            require(seg >= 0 && seg <= 3, errc::invalid_argument, "invalid segment id");
            require(on_segment(domain, points[i], seg, 1e-12), errc::invalid_argument,
                    "boundary node not on its rectangle edge");
        }
    }
    if (points.size() >= 2) {
        SpatialIndex index(points);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto two = index.knn(points[i], 2);
            require(dist2(points[two[0]], points[two[1]]) > 0.0, errc::invalid_argument,
                    "coincident nodes in node set");
        }
    }
}

// ---------------------------------------------------------------------------
// SpatialIndex

SpatialIndex::SpatialIndex(std::span<const Point> points)
    : points_(points.begin(), points.end()) {
    require(!points_.empty(), errc::invalid_argument, "empty node set");
    perm_.resize(points_.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = static_cast<int>(i);
    build(0, static_cast<int>(perm_.size()), 0);
}

void SpatialIndex::build(int lo, int hi, int axis) {
    if (hi - lo <= 1) return;
    const int mid = (lo + hi) / 2;
    std::nth_element(perm_.begin() + lo, perm_.begin() + mid, perm_.begin() + hi,
                     [&](int a, int b) {
                         const double ca = axis_coord(points_[a], axis);
                         const double cb = axis_coord(points_[b], axis);
                         if (ca != cb) return ca < cb;
                         return a < b;
                     });
    build(lo, mid, 1 - axis);
    build(mid + 1, hi, 1 - axis);
}

struct SpatialIndex::KnnState {
    int k = 0;
    // max-heap over (distance^2, index); lexicographic order implements the
    // ascending-index tie break.
    std::priority_queue<std::pair<double, int>> heap;

    void offer(double d2, int idx) {
        if (static_cast<int>(heap.size()) < k) {
            heap.emplace(d2, idx);
        } else if (std::pair<double, int>(d2, idx) < heap.top()) {
            heap.pop();
            heap.emplace(d2, idx);
        }
    }
    bool full() const { return static_cast<int>(heap.size()) == k; }
    double worst() const { return heap.top().first; }
};

void SpatialIndex::search(int lo, int hi, int axis, const Point& q, KnnState& state) const {
    if (lo >= hi) return;
    const int mid = (lo + hi) / 2;
    const int idx = perm_[mid];
    state.offer(dist2(points_[idx], q), idx);

    const double delta = axis_coord(q, axis) - axis_coord(points_[idx], axis);
    const int next = 1 - axis;
    if (delta < 0) {
        search(lo, mid, next, q, state);
        if (!state.full() || delta * delta <= state.worst()) search(mid + 1, hi, next, q, state);
    } else {
        search(mid + 1, hi, next, q, state);
        if (!state.full() || delta * delta <= state.worst()) search(lo, mid, next, q, state);
    }
}

std::vector<int> SpatialIndex::knn(const Point& q, int k) const {
    require(k >= 1, errc::invalid_argument, "knn requires k >= 1");
    require(static_cast<std::size_t>(k) <= points_.size(), errc::invalid_argument,
            "stencil larger than node set");
    KnnState state;
    state.k = k;
    search(0, static_cast<int>(points_.size()), 0, q, state);

    std::vector<std::pair<double, int>> found;
    found.reserve(state.heap.size());
    while (!state.heap.empty()) {
        found.push_back(state.heap.top());
        state.heap.pop();
    }
    std::vector<int> out(found.size());
    for (std::size_t i = 0; i < found.size(); ++i)
        out[found.size() - 1 - i] = found[i].second;
    return out;
}

int SpatialIndex::nearest(const Point& q) const { return knn(q, 1)[0]; }

double SpatialIndex::nearest_distance(const Point& q) const {
    return dist(points_[nearest(q)], q);
}

// ---------------------------------------------------------------------------
// Distance metrics

FillDistanceResult fill_distance_detail(const NodeSet& nodes, int eval_resolution) {
    require(!nodes.points.empty(), errc::invalid_argument, "empty node set");
    require(eval_resolution >= 2, errc::invalid_argument, "eval_resolution must be >= 2");
    SpatialIndex index(nodes.points);
    const Rect& r = nodes.domain;
    FillDistanceResult best;
    double best_d2 = -1.0;
    for (int j = 0; j < eval_resolution; ++j) {
        const double y = r.y0 + r.height() * j / (eval_resolution - 1);
        for (int i = 0; i < eval_resolution; ++i) {
            const double x = r.x0 + r.width() * i / (eval_resolution - 1);
            const Point q{x, y};
            const int nn = index.nearest(q);
            const double d2 = dist2(nodes.points[nn], q);
            if (d2 > best_d2) {
                best_d2 = d2;
                best.witness = q;
            }
        }
    }
    best.value = std::sqrt(best_d2);
    return best;
}

double fill_distance(const NodeSet& nodes, int eval_resolution) {
    return fill_distance_detail(nodes, eval_resolution).value;
}

double separation_distance(const NodeSet& nodes) {
    require(nodes.points.size() >= 2, errc::invalid_argument,
            "separation distance requires at least 2 nodes");
    SpatialIndex index(nodes.points);
    double min_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.points.size(); ++i) {
        const auto two = index.knn(nodes.points[i], 2);
        min_d2 = std::min(min_d2, dist2(nodes.points[two[0]], nodes.points[two[1]]));
    }
    return 0.5 * std::sqrt(min_d2);
}

double mesh_ratio(const NodeSet& nodes, int eval_resolution) {
    return fill_distance(nodes, eval_resolution) / separation_distance(nodes);
}

double effective_fill_distance(double volume, std::size_t n, int d) {
    require(volume > 0.0, errc::invalid_argument, "volume must be positive");
    require(n >= 1, errc::invalid_argument, "node count must be positive");
    require(d >= 1 && d <= 3, errc::invalid_argument, "dimension must be 1, 2, or 3");
    return std::pow(volume / static_cast<double>(n), 1.0 / d);
}

double local_fill_distance(std::span<const Point> points) {
    require(points.size() >= 2, errc::invalid_argument,
            "local fill distance requires at least 2 points");
    double max_gap2 = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double nn2 = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            nn2 = std::min(nn2, dist2(points[i], points[j]));
        }
        max_gap2 = std::max(max_gap2, nn2);
    }
    return std::sqrt(max_gap2);
}

// ---------------------------------------------------------------------------
// Generators

NodeKind parse_node_kind(const std::string& name) {
    if (name == "tensor-grid") return NodeKind::tensor_grid;
    if (name == "halton") return NodeKind::halton;
    if (name == "sine-squash") return NodeKind::sine_squash;
    if (name == "peak-adapted") return NodeKind::peak_adapted;
    throw Error(errc::config, "unknown node generator kind: " + name);
}

std::string node_kind_name(NodeKind kind) {
    switch (kind) {
    case NodeKind::tensor_grid: return "tensor-grid";
    case NodeKind::halton: return "halton";
    case NodeKind::sine_squash: return "sine-squash";
    case NodeKind::peak_adapted: return "peak-adapted";
    }
    return "?";
}

namespace {

int corner_segment_of(int i, int j, int m) {
    if (i == 0 && j == 0) return 0;
    if (i == m - 1 && j == 0) return 1;
    if (i == m - 1 && j == m - 1) return 2;
    if (i == 0 && j == m - 1) return 3;
    return kInteriorSegment;
}

NodeSet make_tensor_grid(int n_target, const Rect& domain) {
    const int m = std::max(3, static_cast<int>(std::lround(std::sqrt(double(n_target)))));
    NodeSet ns;
    ns.domain = domain;
    ns.points.reserve(static_cast<std::size_t>(m) * m);
    auto coord = [&](double lo, double hi, int idx) {
        if (idx == 0) return lo;
        if (idx == m - 1) return hi;
        return lo + (hi - lo) * idx / (m - 1);
    };
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            ns.points.push_back({coord(domain.x0, domain.x1, i), coord(domain.y0, domain.y1, j)});
            int seg = corner_segment_of(i, j, m);
            if (seg == kInteriorSegment) {
                if (j == 0) seg = 0;
                else if (i == m - 1) seg = 1;
                else if (j == m - 1) seg = 2;
                else if (i == 0) seg = 3;
            }
            ns.segment.push_back(seg);
        }
    }
    return ns;
}

// Uniform boundary chain: ix intervals along the x-parallel edges, iy along
// the y-parallel ones; each edge owns its counterclockwise start corner.
void add_uniform_boundary(NodeSet& ns, int ix, int iy) {
    const Rect& r = ns.domain;
    for (int j = 0; j < ix; ++j) {
        ns.points.push_back({j == 0 ? r.x0 : r.x0 + r.width() * j / ix, r.y0});
        ns.segment.push_back(0);
    }
    for (int j = 0; j < iy; ++j) {
        ns.points.push_back({r.x1, j == 0 ? r.y0 : r.y0 + r.height() * j / iy});
        ns.segment.push_back(1);
    }
    for (int j = 0; j < ix; ++j) {
        ns.points.push_back({j == 0 ? r.x1 : r.x1 - r.width() * j / ix, r.y1});
        ns.segment.push_back(2);
    }
    for (int j = 0; j < iy; ++j) {
        ns.points.push_back({r.x0, j == 0 ? r.y1 : r.y1 - r.height() * j / iy});
        ns.segment.push_back(3);
    }
}

double radical_inverse(std::uint64_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

NodeSet make_halton(int n_target, const Rect& domain, std::uint64_t seed) {
    NodeSet ns;
    ns.domain = domain;
    const double h_b = std::sqrt(domain.volume() / n_target);
    int ix = std::max(1, static_cast<int>(std::lround(domain.width() / h_b)));
    int iy = std::max(1, static_cast<int>(std::lround(domain.height() / h_b)));
    while (2 * (ix + iy) > n_target - std::max(1, n_target / 4) && (ix > 1 || iy > 1)) {
        ix = std::max(1, ix - 1);
        iy = std::max(1, iy - 1);
    }
    add_uniform_boundary(ns, ix, iy);

    const int n_interior = n_target - static_cast<int>(ns.points.size());
    require(n_interior >= 1, errc::invalid_argument,
            "n_target too small for halton generator");
    const double margin = 0.45 * std::min(domain.width() / ix, domain.height() / iy);
    std::uint64_t i = 1 + (seed % 100000) * 16;
    int added = 0;
    while (added < n_interior) {
        const Point p{domain.x0 + domain.width() * radical_inverse(i, 2),
                      domain.y0 + domain.height() * radical_inverse(i, 3)};
        ++i;
        if (p.x < domain.x0 + margin || p.x > domain.x1 - margin || p.y < domain.y0 + margin ||
            p.y > domain.y1 - margin)
            continue;
        ns.points.push_back(p);
        ns.segment.push_back(kInteriorSegment);
        ++added;
    }
    return ns;
}

NodeSet make_sine_squash(int n_target, const Rect& domain) {
    NodeSet ns = make_tensor_grid(n_target, domain);
    auto squash = [](double t) {
        if (t <= -1.0) return -1.0;
        if (t >= 1.0) return 1.0;
        return std::sin(std::numbers::pi * t / 2.0);
    };
    for (auto& p : ns.points) {
        const double tx = 2.0 * (p.x - domain.x0) / domain.width() - 1.0;
        const double ty = 2.0 * (p.y - domain.y0) / domain.height() - 1.0;
        p.x = domain.x0 + (squash(tx) + 1.0) * 0.5 * domain.width();
        p.y = domain.y0 + (squash(ty) + 1.0) * 0.5 * domain.height();
    }
    return ns;
}

// Flat uniform-bin grid used by the dart-throwing acceptance test.
class BinGrid {
public:
    BinGrid(const Rect& domain, double cell)
        : domain_(domain), cell_(cell),
          nx_(std::max(1, static_cast<int>(domain.width() / cell) + 1)),
          ny_(std::max(1, static_cast<int>(domain.height() / cell) + 1)),
          bins_(static_cast<std::size_t>(nx_) * ny_) {}

    void insert(const Point& p, int idx) { bins_[bin_of(p)].push_back(idx); }

    template <typename Fn>
    bool any_within(const Point& p, double radius, Fn&& conflicts) const {
        const int span = static_cast<int>(radius / cell_) + 1;
        const int ci = clampi(static_cast<int>((p.x - domain_.x0) / cell_), 0, nx_ - 1);
        const int cj = clampi(static_cast<int>((p.y - domain_.y0) / cell_), 0, ny_ - 1);
        for (int j = std::max(0, cj - span); j <= std::min(ny_ - 1, cj + span); ++j)
            for (int i = std::max(0, ci - span); i <= std::min(nx_ - 1, ci + span); ++i)
                for (int idx : bins_[static_cast<std::size_t>(j) * nx_ + i])
                    if (conflicts(idx)) return true;
        return false;
    }

private:
    static int clampi(int v, int lo, int hi) { return std::min(hi, std::max(lo, v)); }
    std::size_t bin_of(const Point& p) const {
        const int i = clampi(static_cast<int>((p.x - domain_.x0) / cell_), 0, nx_ - 1);
        const int j = clampi(static_cast<int>((p.y - domain_.y0) / cell_), 0, ny_ - 1);
        return static_cast<std::size_t>(j) * nx_ + i;
    }

    Rect domain_;
    double cell_;
    int nx_, ny_;
    std::vector<std::vector<int>> bins_;
};

NodeSet build_peak_set(const Rect& domain, const PeakParams& pp, double scale,
                       std::uint64_t seed, int n_target) {
    const double r_min = scale * pp.r_min;
    const double r_max = scale * pp.r_max;
    auto radius_at = [&](const Point& p) {
        const double t = std::min(1.0, dist(p, pp.peak) / pp.radius);
        return r_min + (r_max - r_min) * t;
    };

    NodeSet ns;
    ns.domain = domain;
    BinGrid grid(domain, std::max(r_min, 1e-6));
    auto try_add = [&](const Point& p, int seg) {
        const double rp = radius_at(p);
        const bool conflict = grid.any_within(p, 0.5 * (rp + r_max), [&](int idx) {
            return dist(p, ns.points[idx]) < 0.5 * (rp + radius_at(ns.points[idx]));
        });
        if (conflict) return false;
        grid.insert(p, static_cast<int>(ns.points.size()));
        ns.points.push_back(p);
        ns.segment.push_back(seg);
        return true;
    };

    // Corners, then edge chains stepped by the local radius (half-step
    // lookahead keeps consecutive gaps close to the radius at both ends).
    try_add({domain.x0, domain.y0}, 0);
    try_add({domain.x1, domain.y0}, 1);
    try_add({domain.x1, domain.y1}, 2);
    try_add({domain.x0, domain.y1}, 3);
    struct Edge {
        Point start, dir;
        double len;
        int seg;
    };
    const std::array<Edge, 4> edges{{
        {{domain.x0, domain.y0}, {1.0, 0.0}, domain.width(), 0},
        {{domain.x1, domain.y0}, {0.0, 1.0}, domain.height(), 1},
        {{domain.x1, domain.y1}, {-1.0, 0.0}, domain.width(), 2},
        {{domain.x0, domain.y1}, {0.0, -1.0}, domain.height(), 3},
    }};
    for (const auto& e : edges) {
        auto at = [&](double s) {
            return Point{e.start.x + e.dir.x * s, e.start.y + e.dir.y * s};
        };
        double s = 0.0;
        while (true) {
            const double look = radius_at(at(std::min(e.len, s + 0.5 * radius_at(at(s)))));
            const double s_next = s + look;
            if (e.len - s_next < 0.8 * radius_at(at(std::min(e.len, s_next)))) break;
            try_add(at(s_next), e.seg);
            s = s_next;
        }
    }

    // Interior dart throwing.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(domain.x0, domain.x1);
    std::uniform_real_distribution<double> uy(domain.y0, domain.y1);
    const long budget = 80L * n_target + 20000;
    int consecutive_rejects = 0;
    for (long attempt = 0; attempt < budget && consecutive_rejects < 5000; ++attempt) {
        const Point p{ux(rng), uy(rng)};
        const double wall = 0.45 * radius_at(p);
        if (p.x - domain.x0 < wall || domain.x1 - p.x < wall || p.y - domain.y0 < wall ||
            domain.y1 - p.y < wall) {
            ++consecutive_rejects;
            continue;
        }
        if (try_add(p, kInteriorSegment))
            consecutive_rejects = 0;
        else
            ++consecutive_rejects;
    }
    return ns;
}

NodeSet make_peak_adapted(const GeneratorSpec& spec, PeakCalibration* calibration) {
    require(spec.peak.has_value(), errc::invalid_argument,
            "params missing for peak-adapted generator");
    const PeakParams& pp = *spec.peak;
    require(pp.r_min > 0 && pp.r_max >= pp.r_min && pp.radius > 0, errc::invalid_argument,
            "invalid peak-adapted params");

    // Saturation density is set by the radii; calibrate their common scale so
    // the output lands near n_target (the r_max/r_min contrast is preserved).
    double scale = 1.0;
    NodeSet ns;
    int rounds = 0;
    for (; rounds < 8; ++rounds) {
        ns = build_peak_set(spec.domain, pp, scale, spec.seed, spec.n_target);
        const double n = static_cast<double>(ns.size());
        if (std::abs(n - spec.n_target) <= 0.10 * spec.n_target) break;
        scale *= std::sqrt(n / spec.n_target);
    }
    const double n_final = static_cast<double>(ns.size());
    require(std::abs(n_final - spec.n_target) <= 0.15 * spec.n_target, errc::solver_failure,
            "peak-adapted generator failed to reach target node count");
    if (calibration) {
        calibration->r_min = scale * pp.r_min;
        calibration->r_max = scale * pp.r_max;
        calibration->rounds = rounds + 1;
    }
    return ns;
}

} // namespace

NodeSet generate_nodes(const GeneratorSpec& spec, PeakCalibration* calibration) {
    require(spec.n_target >= 9, errc::invalid_argument, "n_target must be >= 9");
    require(spec.domain.width() > 0 && spec.domain.height() > 0, errc::invalid_argument,
            "degenerate domain rectangle");
    switch (spec.kind) {
    case NodeKind::tensor_grid: return make_tensor_grid(spec.n_target, spec.domain);
    case NodeKind::halton: return make_halton(spec.n_target, spec.domain, spec.seed);
    case NodeKind::sine_squash: return make_sine_squash(spec.n_target, spec.domain);
    case NodeKind::peak_adapted: return make_peak_adapted(spec, calibration);
    }
    throw Error(errc::invalid_argument, "unknown node generator kind");
}

// ---------------------------------------------------------------------------
// CSV import/export: header `x,y,role,segment`

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void save_nodes_csv(const NodeSet& nodes, std::ostream& out) {
    out << "x,y,role,segment\n";
    for (std::size_t i = 0; i < nodes.points.size(); ++i) {
        const bool bnd = nodes.is_boundary(i);
        out << format_double(nodes.points[i].x) << ',' << format_double(nodes.points[i].y)
            << ',' << (bnd ? "boundary" : "interior") << ',' << nodes.segment[i] << '\n';
    }
}

void save_nodes_csv(const NodeSet& nodes, const std::filesystem::path& path) {
    std::ofstream out(path);
    require(out.good(), errc::io, "cannot open " + path.string() + " for writing");
    save_nodes_csv(nodes, out);
    require(out.good(), errc::io, "write failed: " + path.string());
}

NodeSet load_nodes_csv(std::istream& in, const Rect& domain) {
    NodeSet ns;
    ns.domain = domain;
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), errc::io, "empty node CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "x,y,role,segment", errc::io, "bad node CSV header: " + line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string xs, ys, role, segs;
        require(static_cast<bool>(std::getline(row, xs, ',')) &&
                    static_cast<bool>(std::getline(row, ys, ',')) &&
                    static_cast<bool>(std::getline(row, role, ',')) &&
                    static_cast<bool>(std::getline(row, segs)),
                errc::io, "bad node CSV row at line " + std::to_string(lineno));
        Point p;
        try {
            p.x = std::stod(xs);
            p.y = std::stod(ys);
        } catch (const std::exception&) {
            throw Error(errc::io, "bad coordinate at line " + std::to_string(lineno));
        }
        int seg = 0;
        try {
            seg = std::stoi(segs);
        } catch (const std::exception&) {
            throw Error(errc::io, "bad segment at line " + std::to_string(lineno));
        }
        require(role == "interior" || role == "boundary", errc::io,
                "bad role at line " + std::to_string(lineno));
        if (role == "interior")
            require(seg == kInteriorSegment, errc::io,
                    "interior node with segment id at line " + std::to_string(lineno));
        else
            require(seg >= 0 && seg <= 3, errc::io,
                    "bad boundary segment at line " + std::to_string(lineno));
        ns.points.push_back(p);
        ns.segment.push_back(seg);
    }
    ns.validate();
    return ns;
}

NodeSet load_nodes_csv(const std::filesystem::path& path, const Rect& domain) {
    std::ifstream in(path);
    require(in.good(), errc::io, "cannot open " + path.string());
    return load_nodes_csv(in, domain);
}

} // namespace rbffd
