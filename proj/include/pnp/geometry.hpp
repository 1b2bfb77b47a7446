#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace pnp::geo {

inline constexpr double kPosEps = 1e-6;  // "is a lattice point" slack, meters

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline Point unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Integer axial coordinate of a tile on a HexFrame lattice. Tile identity is
/// always the axial pair; centers are recomputed from it so they never drift.
struct Axial {
    int q = 0;
    int r = 0;
    auto operator<=>(const Axial&) const = default;
};

/// Hex distance in tiles.
inline int tile_distance(Axial a, Axial b) {
    const int dq = a.q - b.q;
    const int dr = a.r - b.r;
    return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

/// One tiling portion: origin center, orientation, side length, plus the
/// identity of the starter action that created it (used to order portions
/// during merge; lower timestamp wins, ties broken by lower starter id).
struct HexFrame {
    Point origin;
    double theta = 0.0;   // radians, normalized to [0, pi/3)
    double side = 5.0;    // meters, equals the sensing radius
    double starter_ts = 0.0;
    int starter_id = 0;

    bool same_portion(const HexFrame& o) const {
        return starter_ts == o.starter_ts && starter_id == o.starter_id;
    }
    /// Strictly older portion ordering.
    bool older_than(const HexFrame& o) const {
        if (starter_ts != o.starter_ts) return starter_ts < o.starter_ts;
        return starter_id < o.starter_id;
    }
};

/// Normalize an orientation into [0, pi/3) (hex rotational symmetry).
double normalize_theta(double theta);

/// Center of the tile at axial index a.
Point axial_center(const HexFrame& frame, Axial a);

/// Tile owning point p. Boundary points resolve to the candidate whose axial
/// index is lexicographically smallest among equidistant centers.
Axial owning_axial(const HexFrame& frame, Point p);
Point owning_center(const HexFrame& frame, Point p);

/// The six edge-adjacent tiles / centers, in bearing order theta+30 deg+k*60 deg.
std::vector<Axial> adjacent_axials(Axial a);
std::vector<Point> adjacent_centers(const HexFrame& frame, Point center);

/// True iff p belongs to the hexagon centered at `center` (which must be a
/// lattice point of `frame` within kPosEps). Boundary handled by owning_axial.
bool point_in_hex(Point p, Point center, const HexFrame& frame);

/// Vertices of the tile hexagon, at bearings theta + k*60 deg.
std::vector<Point> hex_vertices(const HexFrame& frame, Axial a);

struct Polygon {
    std::vector<Point> vertices;

    bool contains(Point p) const;           // even-odd rule
    bool is_simple() const;                 // no self intersections
    void bounds(Point& lo, Point& hi) const;
    double area() const;                    // absolute area
};

bool segments_intersect(Point a, Point b, Point c, Point d);

/// True iff the tile hexagon and the polygon share any area.
bool hex_intersects_polygon(const HexFrame& frame, Axial a, const Polygon& poly);

/// Entry parameter t in [0,1] at which segment a->b first enters the tile
/// hexagon, or nullopt if the segment never does.
std::optional<double> segment_hex_entry(Point a, Point b, const HexFrame& frame, Axial tile);

/// Ordered tiles traversed by segment a->b, starting tile included.
std::vector<Axial> tiles_crossed(Point a, Point b, const HexFrame& frame);

/// Fraction of AoI-interior grid samples (spacing `resolution`, cell centers)
/// within r_s of at least one snapped position. Throws on an empty polygon.
double coverage_fraction(const std::vector<Point>& snapped, const Polygon& aoi,
                         double r_s, double resolution);

}  // namespace pnp::geo
