#include "pnp/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace pnp::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lattice basis: adjacent centers sit at distance sqrt(3)*side, bearings
// theta + 30 deg + k*60 deg. v1 is the k=0 direction, v2 the k=1 direction.
Point basis1(const HexFrame& f) {
    return std::sqrt(3.0) * f.side * unit_dir(f.theta + kPi / 6.0);
}
Point basis2(const HexFrame& f) {
    return std::sqrt(3.0) * f.side * unit_dir(f.theta + kPi / 2.0);
}

}  // namespace

double normalize_theta(double theta) {
    const double period = kPi / 3.0;
    double t = std::fmod(theta, period);
    if (t < 0.0) t += period;
    return t;
}

Point axial_center(const HexFrame& frame, Axial a) {
    return frame.origin + static_cast<double>(a.q) * basis1(frame) +
           static_cast<double>(a.r) * basis2(frame);
}

std::vector<Axial> adjacent_axials(Axial a) {
    // Bearing order theta+30+k*60: +v1, +v2, +v2-v1, -v1, -v2, +v1-v2.
    return {{a.q + 1, a.r},     {a.q, a.r + 1},     {a.q - 1, a.r + 1},
            {a.q - 1, a.r},     {a.q, a.r - 1},     {a.q + 1, a.r - 1}};
}

std::vector<Point> adjacent_centers(const HexFrame& frame, Point center) {
    const Axial a = owning_axial(frame, center);
    std::vector<Point> out;
    out.reserve(6);
    for (Axial n : adjacent_axials(a)) out.push_back(axial_center(frame, n));
    return out;
}

Axial owning_axial(const HexFrame& frame, Point p) {
    const Point d = p - frame.origin;
    const Point v1 = basis1(frame);
    const Point v2 = basis2(frame);
    const double det = cross(v1, v2);
    const double fq = cross(d, v2) / det;
    const double fr = cross(v1, d) / det;

    // Cube rounding onto the hex lattice.
    const double fs = -fq - fr;
    double rq = std::round(fq), rr = std::round(fr), rs = std::round(fs);
    const double dq = std::abs(rq - fq), dr = std::abs(rr - fr), ds = std::abs(rs - fs);
    if (dq > dr && dq > ds)
        rq = -rr - rs;
    else if (dr > ds)
        rr = -rq - rs;
    Axial best{static_cast<int>(rq), static_cast<int>(rr)};

    // Deterministic boundary tie-break: among centers equidistant from p
    // (within 1e-9), pick the lexicographically smallest axial index.
    double best_dist = distance(p, axial_center(frame, best));
    Axial winner = best;
    for (Axial n : adjacent_axials(best)) {
        const double dn = distance(p, axial_center(frame, n));
        if (dn < best_dist - 1e-9) {
            best_dist = dn;
            winner = n;
        } else if (std::abs(dn - best_dist) <= 1e-9 && n < winner) {
            winner = n;
        }
    }
    return winner;
}

Point owning_center(const HexFrame& frame, Point p) {
    return axial_center(frame, owning_axial(frame, p));
}

bool point_in_hex(Point p, Point center, const HexFrame& frame) {
    const Axial c = owning_axial(frame, center);
    if (distance(axial_center(frame, c), center) > kPosEps)
        return false;  // center is not a lattice point of this frame
    return owning_axial(frame, p) == c;
}

std::vector<Point> hex_vertices(const HexFrame& frame, Axial a) {
    const Point c = axial_center(frame, a);
    std::vector<Point> v;
    v.reserve(6);
    for (int k = 0; k < 6; ++k)
        v.push_back(c + frame.side * unit_dir(frame.theta + k * kPi / 3.0));
    return v;
}

bool Polygon::contains(Point p) const {
    bool inside = false;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = vertices[i], b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
    const auto orient = [](Point p, Point q, Point r) {
        const double v = cross(q - p, r - p);
        return (v > 1e-12) - (v < -1e-12);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    const auto on = [](Point p, Point q, Point r) {
        return std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 &&
               std::min(p.y, q.y) - 1e-12 <= r.y && r.y <= std::max(p.y, q.y) + 1e-12;
    };
    if (o1 == 0 && on(a, b, c)) return true;
    if (o2 == 0 && on(a, b, d)) return true;
    if (o3 == 0 && on(c, d, a)) return true;
    if (o4 == 0 && on(c, d, b)) return true;
    return false;
}

bool Polygon::is_simple() const {
    const std::size_t n = vertices.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip adjacent edges (they share an endpoint).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                   vertices[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

void Polygon::bounds(Point& lo, Point& hi) const {
    lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    hi = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (Point v : vertices) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
}

double Polygon::area() const {
    double a = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        a += cross(vertices[j], vertices[i]);
    return std::abs(a) / 2.0;
}

bool hex_intersects_polygon(const HexFrame& frame, Axial a, const Polygon& poly) {
    const auto hv = hex_vertices(frame, a);
    for (Point v : hv)
        if (poly.contains(v)) return true;
    if (poly.contains(axial_center(frame, a))) return true;
    const Axial owner = owning_axial(frame, poly.vertices.front());
    if (owner == a) return true;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        for (int k = 0; k < 6; ++k)
            if (segments_intersect(poly.vertices[j], poly.vertices[i], hv[k], hv[(k + 1) % 6]))
                return true;
    return false;
}

std::optional<double> segment_hex_entry(Point a, Point b, const HexFrame& frame, Axial tile) {
    // Liang-Barsky against the six half-planes dot(p - c, n_k) <= apothem.
    const Point c = axial_center(frame, tile);
    const double apothem = frame.side * std::sqrt(3.0) / 2.0;
    double t_lo = 0.0, t_hi = 1.0;
    const Point d = b - a;
    for (int k = 0; k < 6; ++k) {
        const Point n = unit_dir(frame.theta + kPi / 6.0 + k * kPi / 3.0);
        const double num = apothem - dot(a - c, n);
        const double den = dot(d, n);
        if (std::abs(den) < 1e-15) {
            if (num < 0.0) return std::nullopt;
        } else if (den > 0.0) {
            t_hi = std::min(t_hi, num / den);
        } else {
            t_lo = std::max(t_lo, num / den);
        }
        if (t_lo > t_hi) return std::nullopt;
    }
    return t_lo;
}

std::vector<Axial> tiles_crossed(Point a, Point b, const HexFrame& frame) {
    std::vector<Axial> out;
    Axial cur = owning_axial(frame, a);
    out.push_back(cur);
    const double len = distance(a, b);
    if (len < 1e-12) return out;
    const double apothem = frame.side * std::sqrt(3.0) / 2.0;
    const Point d = b - a;
    double t = 0.0;
    // Walk tile to tile; t only ever moves forward.
    while (t < 1.0) {
        // Exit parameter from the current tile.
        const Point c = axial_center(frame, cur);
        double t_exit = 1.0;
        bool exits = false;
        for (int k = 0; k < 6; ++k) {
            const Point n = unit_dir(frame.theta + kPi / 6.0 + k * kPi / 3.0);
            const double den = dot(d, n);
            if (den > 1e-15) {
                const double tk = (apothem - dot(a - c, n)) / den;
                if (tk < t_exit) {
                    t_exit = tk;
                    exits = true;
                }
            }
        }
        if (!exits || t_exit >= 1.0) break;
        t = std::max(t, t_exit) + 1e-9 / len;  // step just past the shared edge
        Axial next = cur;
        while (t < 1.0 && (next = owning_axial(frame, a + t * d)) == cur)
            t += 1e-6 / len;  // grazing a vertex; nudge until the tile changes
        if (t >= 1.0 || next == cur) break;
        cur = next;
        out.push_back(cur);
    }
    const Axial last = owning_axial(frame, b);
    if (out.back() != last) out.push_back(last);
    return out;
}

double coverage_fraction(const std::vector<Point>& snapped, const Polygon& aoi,
                         double r_s, double resolution) {
    if (aoi.vertices.size() < 3) throw std::invalid_argument("coverage_fraction: empty polygon");
    if (resolution <= 0.0) throw std::invalid_argument("coverage_fraction: resolution <= 0");
    Point lo, hi;
    aoi.bounds(lo, hi);
    const double r2 = r_s * r_s;
    std::size_t total = 0, covered = 0;
    for (double y = lo.y + resolution / 2.0; y < hi.y; y += resolution) {
        for (double x = lo.x + resolution / 2.0; x < hi.x; x += resolution) {
            const Point p{x, y};
            if (!aoi.contains(p)) continue;
            ++total;
            for (const Point& s : snapped) {
                const double dx = s.x - x, dy = s.y - y;
                if (dx * dx + dy * dy <= r2) {
                    ++covered;
                    break;
                }
            }
        }
    }
    if (total == 0) return 0.0;
    return static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace pnp::geo
