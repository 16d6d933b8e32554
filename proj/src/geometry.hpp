#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rbffd {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist2(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = -1.0;
    double y0 = -1.0;
    double x1 = 1.0;
    double y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double volume() const { return width() * height(); }
    bool contains(const Point& p, double tol = 0.0) const {
        return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
    }
};

/// Edge segment ids: 0: y=y0, 1: x=x1, 2: y=y2 (top), 3: x=x0.
/// Corners are owned by the edge that starts there walking counterclockwise:
/// (x0,y0)->0, (x1,y0)->1, (x1,y1)->2, (x0,y1)->3.
inline constexpr int kInteriorSegment = -1;

Point outward_normal(int segment);
bool on_segment(const Rect& domain, const Point& p, int segment, double tol = 1e-12);

/// Scattered nodes with interior/boundary roles over a rectangular domain.
struct NodeSet {
    std::vector<Point> points;
    std::vector<int> segment; // kInteriorSegment for interior, else edge id 0..3
    Rect domain;

    std::size_t size() const { return points.size(); }
    bool is_boundary(std::size_t i) const { return segment[i] != kInteriorSegment; }
    std::size_t interior_count() const;

    /// Checks the structural invariants: points inside the closed domain,
    /// pairwise distinct, boundary tags consistent with the rectangle edges.
    void validate() const;
};

/// Exact nearest-neighbor queries over a fixed point cloud (2-d kd-tree).
/// Immutable after construction; concurrent reads are safe.
class SpatialIndex {
public:
    explicit SpatialIndex(std::span<const Point> points);

    std::size_t size() const { return points_.size(); }

    /// Indices of the k nearest points to q, sorted by ascending distance,
    /// ties broken by ascending point index.
    std::vector<int> knn(const Point& q, int k) const;

    int nearest(const Point& q) const;
    double nearest_distance(const Point& q) const;

private:
    void build(int lo, int hi, int axis);

    struct KnnState;
    void search(int lo, int hi, int axis, const Point& q, KnnState& state) const;

    std::vector<Point> points_;
    std::vector<int> perm_;
};

struct FillDistanceResult {
    double value = 0.0;
    Point witness; // eval-grid point attaining the max
};

/// Fill distance approximated by a max-min over a resolution x resolution
/// candidate grid covering the domain.
FillDistanceResult fill_distance_detail(const NodeSet& nodes, int eval_resolution = 201);
double fill_distance(const NodeSet& nodes, int eval_resolution = 201);

/// Half the minimum pairwise distance.
double separation_distance(const NodeSet& nodes);

double mesh_ratio(const NodeSet& nodes, int eval_resolution = 201);

/// (volume/n)^(1/d), the spacing of an equally dense uniform set.
double effective_fill_distance(double volume, std::size_t n, int d);

/// Largest nearest-neighbor gap within a point list: max over members of the
/// distance to the closest other member.
double local_fill_distance(std::span<const Point> points);

enum class NodeKind {
    tensor_grid,
    halton,
    sine_squash,
    peak_adapted,
};

NodeKind parse_node_kind(const std::string& name);
std::string node_kind_name(NodeKind kind);

/// Spacing profile for the peak-adapted sampler:
/// r(p) = r_min + (r_max - r_min) * min(1, |p - peak| / radius).
struct PeakParams {
    Point peak;
    double r_min = 0.0;
    double r_max = 0.0;
    double radius = 0.25;
};

struct GeneratorSpec {
    NodeKind kind = NodeKind::tensor_grid;
    int n_target = 0;
    Rect domain;
    std::optional<PeakParams> peak; // required for peak_adapted
    std::uint64_t seed = 0;
};

/// Radii actually used after calibrating the peak-adapted sampler to n_target.
struct PeakCalibration {
    double r_min = 0.0;
    double r_max = 0.0;
    int rounds = 0;
};

NodeSet generate_nodes(const GeneratorSpec& spec, PeakCalibration* calibration = nullptr);

void save_nodes_csv(const NodeSet& nodes, std::ostream& out);
void save_nodes_csv(const NodeSet& nodes, const std::filesystem::path& path);
NodeSet load_nodes_csv(std::istream& in, const Rect& domain);
NodeSet load_nodes_csv(const std::filesystem::path& path, const Rect& domain);

} // namespace rbffd
