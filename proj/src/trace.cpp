#include "pnp/trace.hpp"

#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pnp::trace {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

}  // namespace

double time_of(const Record& r) {
    return std::visit([](const auto& v) { return v.t; }, r);
}

std::string header_line(const Header& h) {
    std::ostringstream os;
    os << fmt("CFG n=%d seed=%llu r_s=%.9f r_tx=%.9f speed=%.9f max_time=%.9f e_tx=%.9f "
              "e_rx=%.9f e_motion=%.9f cov_res=%.9f cov_thr=%.9f qwin=%.9f aoi=",
              h.n_sensors, static_cast<unsigned long long>(h.seed), h.r_s, h.r_tx, h.speed,
              h.max_time, h.e_tx, h.e_rx, h.e_motion, h.coverage_resolution,
              h.coverage_threshold, h.quiescence_window);
    for (std::size_t i = 0; i < h.aoi.size(); ++i) {
        if (i) os << ';';
        os << fmt("%.9f,%.9f", h.aoi[i].x, h.aoi[i].y);
    }
    return os.str();
}

std::string record_line(const Record& r) {
    struct V {
        std::string operator()(const MsgSend& v) {
            std::string to = v.to ? fmt("%d", *v.to) : "bcast";
            return fmt("MSG t=%.9f from=%d to=%s variant=%s ", v.t, v.from, to.c_str(),
                       v.variant.c_str()) +
                   v.payload;
        }
        std::string operator()(const RoleChange& v) {
            std::string s = fmt("ROLE t=%.9f id=%d role=%s x=%.9f y=%.9f", v.t, v.id,
                                v.role.c_str(), v.pos.x, v.pos.y);
            if (v.frame_starter >= 0)
                s += fmt(" frame=%.9f:%d origin=%.9f,%.9f theta=%.9f", v.frame_ts,
                         v.frame_starter, v.frame_origin.x, v.frame_origin.y, v.frame_theta);
            return s;
        }
        std::string operator()(const MotionBegin& v) {
            return fmt("MOVB t=%.9f id=%d from=%.9f,%.9f to=%.9f,%.9f", v.t, v.id, v.from.x,
                       v.from.y, v.to.x, v.to.y);
        }
        std::string operator()(const MotionEnd& v) {
            return fmt("MOVE t=%.9f id=%d at=%.9f,%.9f dist=%.9f", v.t, v.id, v.at.x, v.at.y,
                       v.dist);
        }
        std::string operator()(const Snapshot& v) {
            return fmt("POS t=%.9f id=%d x=%.9f y=%.9f role=%s", v.t, v.id, v.pos.x, v.pos.y,
                       v.role.c_str());
        }
        std::string operator()(const Failure& v) { return fmt("FAIL t=%.9f id=%d", v.t, v.id); }
        std::string operator()(const End& v) {
            return fmt("END t=%.9f quiesced=%d energy=%.9f", v.t, v.quiesced ? 1 : 0,
                       v.energy_spent);
        }
    };
    return std::visit(V{}, r);
}

void write(const Trace& t, std::ostream& os) {
    os << "PNP-TRACE v1\n" << header_line(t.header) << "\n";
    for (const Record& r : t.records) os << record_line(r) << "\n";
}

namespace {

// key=value scanning helpers for the reader.
std::map<std::string, std::string> kv(const std::string& line, std::size_t start) {
    std::map<std::string, std::string> out;
    std::size_t i = start;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t eq = line.find('=', i);
        if (eq == std::string::npos) break;
        std::string key = line.substr(i, eq - i);
        std::size_t end = line.find(' ', eq + 1);
        if (end == std::string::npos) end = line.size();
        out[key] = line.substr(eq + 1, end - eq - 1);
        i = end + 1;
    }
    return out;
}

Point parse_pt(const std::string& s) {
    Point p;
    std::sscanf(s.c_str(), "%lf,%lf", &p.x, &p.y);
    return p;
}

}  // namespace

Trace read(std::istream& is) {
    Trace t;
    std::string line;
    if (!std::getline(is, line) || line.rfind("PNP-TRACE", 0) != 0)
        throw std::runtime_error("not a trace file");
    if (!std::getline(is, line) || line.rfind("CFG ", 0) != 0)
        throw std::runtime_error("trace missing CFG header");
    {
        auto m = kv(line, 4);
        Header& h = t.header;
        h.n_sensors = std::stoi(m.at("n"));
        h.seed = std::stoull(m.at("seed"));
        h.r_s = std::stod(m.at("r_s"));
        h.r_tx = std::stod(m.at("r_tx"));
        h.speed = std::stod(m.at("speed"));
        h.max_time = std::stod(m.at("max_time"));
        h.e_tx = std::stod(m.at("e_tx"));
        h.e_rx = std::stod(m.at("e_rx"));
        h.e_motion = std::stod(m.at("e_motion"));
        h.coverage_resolution = std::stod(m.at("cov_res"));
        h.coverage_threshold = std::stod(m.at("cov_thr"));
        h.quiescence_window = std::stod(m.at("qwin"));
        std::stringstream ss(m.at("aoi"));
        std::string tok;
        while (std::getline(ss, tok, ';'))
            if (!tok.empty()) h.aoi.push_back(parse_pt(tok));
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::string tag = line.substr(0, line.find(' '));
        auto m = kv(line, tag.size() + 1);
        if (tag == "MSG") {
            MsgSend r;
            r.t = std::stod(m.at("t"));
            r.from = std::stoi(m.at("from"));
            if (m.at("to") != "bcast") r.to = std::stoi(m.at("to"));
            r.variant = m.at("variant");
            std::size_t vpos = line.find("variant=");
            std::size_t sp = line.find(' ', vpos);
            r.payload = sp == std::string::npos ? "" : line.substr(sp + 1);
            t.records.emplace_back(std::move(r));
        } else if (tag == "ROLE") {
            RoleChange r;
            r.t = std::stod(m.at("t"));
            r.id = std::stoi(m.at("id"));
            r.role = m.at("role");
            r.pos = {std::stod(m.at("x")), std::stod(m.at("y"))};
            if (m.count("frame")) {
                std::sscanf(m.at("frame").c_str(), "%lf:%d", &r.frame_ts, &r.frame_starter);
                r.frame_origin = parse_pt(m.at("origin"));
                r.frame_theta = std::stod(m.at("theta"));
            }
            t.records.emplace_back(std::move(r));
        } else if (tag == "MOVB") {
            MotionBegin r;
            r.t = std::stod(m.at("t"));
            r.id = std::stoi(m.at("id"));
            r.from = parse_pt(m.at("from"));
            r.to = parse_pt(m.at("to"));
            t.records.emplace_back(r);
        } else if (tag == "MOVE") {
            MotionEnd r;
            r.t = std::stod(m.at("t"));
            r.id = std::stoi(m.at("id"));
            r.at = parse_pt(m.at("at"));
            r.dist = std::stod(m.at("dist"));
            t.records.emplace_back(r);
        } else if (tag == "POS") {
            Snapshot r;
            r.t = std::stod(m.at("t"));
            r.id = std::stoi(m.at("id"));
            r.pos = {std::stod(m.at("x")), std::stod(m.at("y"))};
            r.role = m.at("role");
            t.records.emplace_back(std::move(r));
        } else if (tag == "FAIL") {
            Failure r;
            r.t = std::stod(m.at("t"));
            r.id = std::stoi(m.at("id"));
            t.records.emplace_back(r);
        } else if (tag == "END") {
            End r;
            r.t = std::stod(m.at("t"));
            r.quiesced = m.at("quiesced") == "1";
            r.energy_spent = std::stod(m.at("energy"));
            t.records.emplace_back(r);
        }
    }
    return t;
}

Trace read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open trace: " + path);
    return read(f);
}

void write_file(const Trace& t, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write trace: " + path);
    write(t, f);
}

}  // namespace pnp::trace
