#include "pnp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "pnp/geometry.hpp"

namespace pnp::metrics {

namespace {

using geo::Point;
using trace::Record;

// Extract "key=(x,y)" from a payload line.
std::optional<Point> payload_point(const std::string& payload, const std::string& key) {
    const std::string pat = key + "=(";
    auto pos = payload.find(pat);
    if (pos == std::string::npos) return std::nullopt;
    Point p;
    if (std::sscanf(payload.c_str() + pos + pat.size(), "%lf,%lf", &p.x, &p.y) != 2)
        return std::nullopt;
    return p;
}

std::string pos_key(Point p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f", p.x, p.y);
    return buf;
}

// Incremental disk-coverage counter over the AoI sample grid.
struct CoverageGrid {
    Point lo, hi;
    double res, r_s;
    int nx = 0, ny = 0;
    std::vector<int> counts;     // covering disks per in-AoI cell; -1 = outside
    long inside = 0, covered = 0;

    CoverageGrid(const geo::Polygon& aoi, double res_, double r_s_) : res(res_), r_s(r_s_) {
        aoi.bounds(lo, hi);
        nx = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / res)));
        ny = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / res)));
        counts.assign(static_cast<std::size_t>(nx) * ny, -1);
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const Point c{lo.x + (ix + 0.5) * res, lo.y + (iy + 0.5) * res};
                if (aoi.contains(c)) {
                    counts[static_cast<std::size_t>(iy) * nx + ix] = 0;
                    ++inside;
                }
            }
    }
    void apply(Point p, int delta) {
        const int x0 = std::max(0, static_cast<int>((p.x - r_s - lo.x) / res) - 1);
        const int x1 = std::min(nx - 1, static_cast<int>((p.x + r_s - lo.x) / res) + 1);
        const int y0 = std::max(0, static_cast<int>((p.y - r_s - lo.y) / res) - 1);
        const int y1 = std::min(ny - 1, static_cast<int>((p.y + r_s - lo.y) / res) + 1);
        const double r2 = r_s * r_s;
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix) {
                int& c = counts[static_cast<std::size_t>(iy) * nx + ix];
                if (c < 0) continue;
                const Point q{lo.x + (ix + 0.5) * res, lo.y + (iy + 0.5) * res};
                const double dx = q.x - p.x, dy = q.y - p.y;
                if (dx * dx + dy * dy > r2) continue;
                if (delta > 0 && c++ == 0) ++covered;
                if (delta < 0 && --c == 0) --covered;
            }
    }
    double fraction() const { return inside ? static_cast<double>(covered) / inside : 0.0; }
};

struct Interval {
    double a, b;
};

std::vector<Interval> activity_intervals(const trace::Trace& t) {
    std::vector<Interval> iv;
    std::map<int, double> open_motion;
    double endt = 0.0;
    for (const Record& r : t.records) {
        endt = std::max(endt, trace::time_of(r));
        if (const auto* m = std::get_if<trace::MsgSend>(&r)) {
            iv.push_back({m->t, m->t});
        } else if (const auto* mb = std::get_if<trace::MotionBegin>(&r)) {
            open_motion[mb->id] = mb->t;
        } else if (const auto* me = std::get_if<trace::MotionEnd>(&r)) {
            auto it = open_motion.find(me->id);
            if (it != open_motion.end()) {
                iv.push_back({it->second, me->t});
                open_motion.erase(it);
            }
        }
    }
    for (const auto& [id, a] : open_motion) iv.push_back({a, endt});
    std::sort(iv.begin(), iv.end(), [](Interval x, Interval y) { return x.a < y.a; });
    // merge
    std::vector<Interval> out;
    for (Interval i : iv) {
        if (!out.empty() && i.a <= out.back().b + 1e-12)
            out.back().b = std::max(out.back().b, i.b);
        else
            out.push_back(i);
    }
    return out;
}

}  // namespace

std::optional<double> detect_termination(const trace::Trace& t, double window) {
    const auto iv = activity_intervals(t);
    if (iv.empty()) return 0.0;
    for (std::size_t i = 0; i < iv.size(); ++i) {
        const double end = iv[i].b;
        if (i + 1 == iv.size()) return end;
        if (iv[i + 1].a > end + window) return end;
    }
    return std::nullopt;
}

double count_snap_conflicts(const trace::Trace& t) {
    std::map<std::string, std::set<int>> contenders;
    std::set<std::string> taken;
    // last SIP target per (issuer, candidate), resolved by the AckSIP
    std::map<std::pair<int, int>, std::string> last_sip;
    for (const Record& r : t.records) {
        const auto* m = std::get_if<trace::MsgSend>(&r);
        if (!m) continue;
        if (m->variant == "SIP" && m->to) {
            if (auto p = payload_point(m->payload, "target_position"))
                last_sip[{m->from, *m->to}] = pos_key(*p);
        } else if (m->variant == "AckSIP" && m->to) {
            auto it = last_sip.find({*m->to, m->from});
            if (it != last_sip.end()) contenders[it->second].insert(m->from);
        } else if (m->variant == "ClaimPosition") {
            if (auto p = payload_point(m->payload, "coordinates"))
                contenders[pos_key(*p)].insert(m->from);
        } else if (m->variant == "IAS") {
            if (auto p = payload_point(m->payload, "coordinates")) taken.insert(pos_key(*p));
        }
    }
    if (taken.empty()) return 0.0;
    long conflicts = 0;
    for (const auto& [key, ids] : contenders)
        conflicts += std::max<long>(0, static_cast<long>(ids.size()) - 1);
    return static_cast<double>(conflicts) / static_cast<double>(taken.size());
}

double count_push_conflicts(const trace::Trace& t) {
    std::map<std::pair<int, int>, long> open_offers;  // (from, to) -> outstanding count
    long offers = 0, matched = 0;
    std::set<int> ever_slave;
    for (const Record& r : t.records) {
        if (const auto* rc = std::get_if<trace::RoleChange>(&r)) {
            if (rc->role == "slave") ever_slave.insert(rc->id);
            continue;
        }
        const auto* m = std::get_if<trace::MsgSend>(&r);
        if (!m || !m->to) continue;
        if (m->variant == "Offer") {
            ++offers;
            ++open_offers[{m->from, *m->to}];
        } else if (m->variant == "AckOffer") {
            auto it = open_offers.find({*m->to, m->from});
            if (it != open_offers.end() && it->second > 0) {
                --it->second;
                ++matched;
            }
        }
    }
    if (ever_slave.empty()) return 0.0;
    return static_cast<double>(offers - matched) / static_cast<double>(ever_slave.size());
}

RunReport analyze(const trace::Trace& t) {
    RunReport rep;
    CoverageGrid grid(geo::Polygon{t.header.aoi}, t.header.coverage_resolution,
                      t.header.r_s);
    struct SensorView {
        std::string role = "free";
        Point pos{};
        bool disk = false;
        Point disk_pos{};
        bool failed = false;
        double frame_ts = -1.0;
        int frame_starter = -1;
        double distance = 0.0;
    };
    std::map<int, SensorView> sensors;
    std::set<std::string> snap_positions;

    auto update_disk = [&](SensorView& sv, double now) {
        const bool should = !sv.failed && (sv.role == "snapped" || sv.role == "hybrid");
        if (sv.disk && (!should || !(sv.disk_pos == sv.pos))) {
            grid.apply(sv.disk_pos, -1);
            sv.disk = false;
        }
        if (should && !sv.disk) {
            grid.apply(sv.pos, +1);
            sv.disk = true;
            sv.disk_pos = sv.pos;
        }
        if (!rep.coverage_time && grid.fraction() >= t.header.coverage_threshold)
            rep.coverage_time = now;
    };

    for (const Record& r : t.records) {
        const double now = trace::time_of(r);
        if (const auto* m = std::get_if<trace::MsgSend>(&r)) {
            ++rep.messages_total;
            ++rep.messages_by_variant[m->variant];
            if (m->variant == "IAS")
                if (auto p = payload_point(m->payload, "coordinates"))
                    snap_positions.insert(pos_key(*p));
        } else if (const auto* rc = std::get_if<trace::RoleChange>(&r)) {
            auto& sv = sensors[rc->id];
            sv.role = rc->role;
            sv.pos = rc->pos;
            sv.frame_ts = rc->frame_ts;
            sv.frame_starter = rc->frame_starter;
            update_disk(sv, now);
        } else if (const auto* me = std::get_if<trace::MotionEnd>(&r)) {
            auto& sv = sensors[me->id];
            sv.pos = me->at;
            sv.distance += me->dist;
            update_disk(sv, now);
        } else if (const auto* mb = std::get_if<trace::MotionBegin>(&r)) {
            sensors[mb->id].pos = mb->from;
        } else if (const auto* ps = std::get_if<trace::Snapshot>(&r)) {
            auto& sv = sensors[ps->id];
            sv.pos = ps->pos;
            update_disk(sv, now);
        } else if (const auto* f = std::get_if<trace::Failure>(&r)) {
            auto& sv = sensors[f->id];
            sv.failed = true;
            update_disk(sv, now);
        } else if (const auto* e = std::get_if<trace::End>(&r)) {
            rep.quiesced = e->quiesced;
            rep.end_time = e->t;
            rep.energy_spent = e->energy_spent;
        }
    }

    rep.final_coverage = grid.fraction();
    rep.termination_time = detect_termination(t, t.header.quiescence_window);
    rep.snap_conflicts_per_position = count_snap_conflicts(t);
    rep.push_conflicts_per_slave = count_push_conflicts(t);
    rep.snap_positions_taken = static_cast<int>(snap_positions.size());
    std::set<std::pair<double, int>> portions;
    for (const auto& [id, sv] : sensors) {
        rep.total_distance += sv.distance;
        if (!sv.failed && (sv.role == "snapped" || sv.role == "hybrid") &&
            sv.frame_starter >= 0)
            portions.insert({sv.frame_ts, sv.frame_starter});
    }
    rep.final_portion_count = static_cast<int>(portions.size());
    return rep;
}

namespace {
std::string opt_str(const std::optional<double>& v) {
    if (!v) return "none";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return buf;
}
}  // namespace

std::string report_text(const RunReport& r) {
    std::ostringstream os;
    os << "end_time: " << opt_str(r.end_time) << "\n"
       << "quiesced: " << (r.quiesced ? "yes" : "no") << "\n"
       << "coverage_time: " << opt_str(r.coverage_time) << "\n"
       << "termination_time: " << opt_str(r.termination_time) << "\n"
       << "final_coverage: " << opt_str(r.final_coverage) << "\n"
       << "final_portion_count: " << r.final_portion_count << "\n"
       << "snap_positions_taken: " << r.snap_positions_taken << "\n"
       << "snap_conflicts_per_position: " << opt_str(r.snap_conflicts_per_position) << "\n"
       << "push_conflicts_per_slave: " << opt_str(r.push_conflicts_per_slave) << "\n"
       << "messages_total: " << r.messages_total << "\n"
       << "total_distance: " << opt_str(r.total_distance) << "\n"
       << "energy_spent: " << opt_str(r.energy_spent) << "\n"
       << "messages_by_variant:\n";
    for (const auto& [v, n] : r.messages_by_variant) os << "  " << v << ": " << n << "\n";
    return os.str();
}

std::string csv_header() {
    return "label,seed,end_time,quiesced,coverage_time,termination_time,final_coverage,"
           "final_portion_count,snap_positions_taken,snap_conflicts_per_position,"
           "push_conflicts_per_slave,messages_total,total_distance,energy_spent";
}

std::string csv_row(const std::string& label, std::uint64_t seed, const RunReport& r) {
    std::ostringstream os;
    os << label << ',' << seed << ',' << opt_str(r.end_time) << ','
       << (r.quiesced ? 1 : 0) << ',' << opt_str(r.coverage_time) << ','
       << opt_str(r.termination_time) << ',' << opt_str(r.final_coverage) << ','
       << r.final_portion_count << ',' << r.snap_positions_taken << ','
       << opt_str(r.snap_conflicts_per_position) << ','
       << opt_str(r.push_conflicts_per_slave) << ',' << r.messages_total << ','
       << opt_str(r.total_distance) << ',' << opt_str(r.energy_spent);
    return os.str();
}

}  // namespace pnp::metrics
