#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pnp/geometry.hpp"

namespace pnp::trace {

using geo::Point;

/// Run parameters echoed into the trace header so that every metric is a
/// pure function of the trace file.
struct Header {
    int n_sensors = 0;
    std::uint64_t seed = 0;
    double r_s = 5.0;
    double r_tx = 11.0;
    double speed = 1.0;
    double max_time = 0.0;
    double e_tx = 0.01;
    double e_rx = 0.005;
    double e_motion = 1.0;
    double coverage_resolution = 0.25;
    double coverage_threshold = 0.99;
    double quiescence_window = 150.0;
    std::vector<Point> aoi;
};

struct MsgSend {
    double t;
    int from;
    std::optional<int> to;  // nullopt = broadcast
    std::string variant;
    std::string payload;
};
struct RoleChange {
    double t;
    int id;
    std::string role;
    Point pos;
    // Portion identity, present once the sensor belongs to a frame.
    double frame_ts = -1.0;
    int frame_starter = -1;
    Point frame_origin{};
    double frame_theta = 0.0;
};
struct MotionBegin {
    double t;
    int id;
    Point from;
    Point to;
};
struct MotionEnd {
    double t;
    int id;
    Point at;
    double dist;
};
struct Snapshot {
    double t;
    int id;
    Point pos;
    std::string role;
};
struct Failure {
    double t;
    int id;
};
struct End {
    double t;
    bool quiesced;
    double energy_spent;
};

using Record =
    std::variant<MsgSend, RoleChange, MotionBegin, MotionEnd, Snapshot, Failure, End>;

struct Trace {
    Header header;
    std::vector<Record> records;
};

double time_of(const Record& r);

std::string header_line(const Header& h);
std::string record_line(const Record& r);

void write(const Trace& t, std::ostream& os);
Trace read(std::istream& is);
Trace read_file(const std::string& path);
void write_file(const Trace& t, const std::string& path);

}  // namespace pnp::trace
