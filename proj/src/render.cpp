#include "pnp/render.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "pnp/geometry.hpp"

namespace pnp::render {

namespace {

using geo::Point;

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

const char* role_color(const std::string& role) {
    if (role == "snapped") return "#1565c0";
    if (role == "hybrid") return "#6a1b9a";
    if (role == "slave") return "#2e7d32";
    if (role == "stopped") return "#ef6c00";
    return "#9e9e9e";  // free
}

struct SensorView {
    Point pos{};
    std::string role = "free";
    bool failed = false;
    std::optional<Point> motion_target;
};

}  // namespace

double trace_end(const trace::Trace& t) {
    double e = 0.0;
    for (const auto& r : t.records) e = std::max(e, trace::time_of(r));
    return e;
}

std::string render_svg(const trace::Trace& t, double time, const RenderSpec& spec) {
    if (spec.layers.empty()) throw std::runtime_error("render: empty layer set");
    const double end = trace_end(t);
    if (time < 0.0 || time > end + 1e-9) {
        std::ostringstream os;
        os << "render: time " << time << " outside trace span [0, " << end << "]";
        throw std::runtime_error(os.str());
    }

    std::map<int, SensorView> sensors;
    std::optional<geo::HexFrame> frame;
    for (const auto& r : t.records) {
        if (trace::time_of(r) > time + 1e-9) break;
        if (const auto* rc = std::get_if<trace::RoleChange>(&r)) {
            auto& sv = sensors[rc->id];
            sv.role = rc->role;
            sv.pos = rc->pos;
            if (rc->frame_starter >= 0) {
                geo::HexFrame fr;
                fr.origin = rc->frame_origin;
                fr.theta = rc->frame_theta;
                fr.side = t.header.r_s;
                fr.starter_ts = rc->frame_ts;
                fr.starter_id = rc->frame_starter;
                if (!frame || fr.older_than(*frame)) frame = fr;
            }
        } else if (const auto* ps = std::get_if<trace::Snapshot>(&r)) {
            auto& sv = sensors[ps->id];
            sv.pos = ps->pos;
            sv.role = ps->role;
        } else if (const auto* mb = std::get_if<trace::MotionBegin>(&r)) {
            auto& sv = sensors[mb->id];
            sv.pos = mb->from;
            sv.motion_target = mb->to;
        } else if (const auto* me = std::get_if<trace::MotionEnd>(&r)) {
            auto& sv = sensors[me->id];
            sv.pos = me->at;
            sv.motion_target.reset();
        } else if (const auto* f = std::get_if<trace::Failure>(&r)) {
            sensors[f->id].failed = true;
            sensors[f->id].motion_target.reset();
        }
    }

    geo::Polygon aoi{t.header.aoi};
    Point lo, hi;
    aoi.bounds(lo, hi);
    const double margin = t.header.r_s + 2.0;
    lo = lo - Point{margin, margin};
    hi = hi + Point{margin, margin};
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    const double scale = spec.canvas / span;
    auto X = [&](double x) { return (x - lo.x) * scale; };
    auto Y = [&](double y) { return spec.canvas - (y - lo.y) * scale; };  // y-up

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.canvas
       << "\" height=\"" << spec.canvas << "\" viewBox=\"0 0 " << spec.canvas << ' '
       << spec.canvas << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<!-- t=" << f2(time) << " -->\n";

    if (spec.layers.count(Layer::HexTiling) && frame) {
        os << "<g stroke=\"#e0e0e0\" fill=\"none\" stroke-width=\"1\">\n";
        const geo::Axial origin = geo::owning_axial(*frame, {(lo.x + hi.x) / 2,
                                                             (lo.y + hi.y) / 2});
        const int reach = static_cast<int>(span / (frame->side * 1.5)) + 2;
        for (int q = -reach; q <= reach; ++q)
            for (int rr = -reach; rr <= reach; ++rr) {
                const geo::Axial a{origin.q + q, origin.r + rr};
                const Point c = geo::axial_center(*frame, a);
                if (c.x < lo.x || c.x > hi.x || c.y < lo.y || c.y > hi.y) continue;
                const auto verts = geo::hex_vertices(*frame, a);
                os << "<polygon points=\"";
                for (const Point& v : verts) os << f2(X(v.x)) << ',' << f2(Y(v.y)) << ' ';
                os << "\"/>\n";
            }
        os << "</g>\n";
    }

    if (spec.layers.count(Layer::AoiOutline)) {
        os << "<polygon fill=\"none\" stroke=\"#212121\" stroke-width=\"2\" points=\"";
        for (const Point& v : t.header.aoi) os << f2(X(v.x)) << ',' << f2(Y(v.y)) << ' ';
        os << "\"/>\n";
    }

    if (spec.layers.count(Layer::SensingDisks)) {
        os << "<g fill=\"#1565c0\" fill-opacity=\"0.08\" stroke=\"none\">\n";
        for (const auto& [id, sv] : sensors) {
            if (sv.failed || (sv.role != "snapped" && sv.role != "hybrid")) continue;
            os << "<circle cx=\"" << f2(X(sv.pos.x)) << "\" cy=\"" << f2(Y(sv.pos.y))
               << "\" r=\"" << f2(t.header.r_s * scale) << "\"/>\n";
        }
        os << "</g>\n";
    }

    if (spec.layers.count(Layer::MotionArrows)) {
        os << "<g stroke=\"#c62828\" stroke-width=\"1\">\n";
        for (const auto& [id, sv] : sensors) {
            if (sv.failed || !sv.motion_target) continue;
            os << "<line x1=\"" << f2(X(sv.pos.x)) << "\" y1=\"" << f2(Y(sv.pos.y))
               << "\" x2=\"" << f2(X(sv.motion_target->x)) << "\" y2=\""
               << f2(Y(sv.motion_target->y)) << "\"/>\n";
        }
        os << "</g>\n";
    }

    if (spec.layers.count(Layer::Sensors)) {
        for (const auto& [id, sv] : sensors) {
            const char* color = sv.failed ? "#000000" : role_color(sv.role);
            os << "<circle cx=\"" << f2(X(sv.pos.x)) << "\" cy=\"" << f2(Y(sv.pos.y))
               << "\" r=\"3\" fill=\"" << color << "\"><title>" << id << ' '
               << (sv.failed ? "failed" : sv.role) << "</title></circle>\n";
        }
    }

    os << "</svg>\n";
    return os.str();
}

}  // namespace pnp::render
