#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "pnp/geometry.hpp"
#include "pnp/protocol.hpp"
#include "pnp/trace.hpp"

namespace pnp::engine {

using geo::Point;

struct MediumParams {
    double base_latency = 0.010;
    double jitter_max = 0.005;
    double loss = 0.0;   // per-attempt loss probability
    int retries = 3;     // retransmissions below the protocol layer
};

struct EnergyParams {
    double initial = 1e4;
    double e_tx = 0.01;
    double e_rx = 0.005;
    double e_motion = 1.0;  // joules per meter
};

struct EngineConfig {
    geo::Polygon aoi;
    double r_s = 5.0;
    double r_tx = 11.0;
    double speed = 1.0;
    MediumParams medium;
    EnergyParams energy;
    double delta_sub = 500.0;
    double max_time = 2000.0;
    double snapshot_interval = 5.0;
    double quiescence_window = 150.0;
    double coverage_resolution = 0.25;
    double coverage_threshold = 0.99;
    std::vector<std::pair<int, double>> failures;  // (sensor id, fail time)
    std::uint64_t seed = 0;
};

class Engine {
  public:
    explicit Engine(EngineConfig cfg);

    void add_sensor(int id, Point pos, double energy);
    /// Direct access for test fixtures that preload protocol state.
    proto::SensorState& sensor_state(int id);
    const proto::SensorState& sensor_state(int id) const;
    Point sensor_position(int id) const { return sensor_state(id).position; }

    /// Draw per-sensor starter instants and orientations from the seeded
    /// starter stream and schedule them.
    void schedule_starters();
    /// Schedule a protocol input directly (test scenarios).
    void inject(int id, proto::Input in, double t);

    /// Run to quiescence (empty queue) or max_time; returns the trace.
    trace::Trace run();

    const proto::Context& context() const { return ctx_; }
    const EngineConfig& config() const { return cfg_; }

  private:
    struct Sensor {
        proto::SensorState state;
        bool alive = true;
        double initial_energy = 0.0;
        double total_distance = 0.0;
        double plan_start_dist = 0.0;
        // motion
        bool moving = false;
        long gen = 0;  // invalidates stale waypoint events
        std::vector<proto::Checkpoint> plan;
        std::size_t next_cp = 0;
        Point seg_start;
        double seg_start_t = 0.0;
        std::map<proto::TimerKey, double> timers;
    };

    struct Event {
        double t = 0.0;
        std::uint64_t seq = 0;
        int kind = 0;  // 0 delivery, 1 timer, 2 waypoint, 3 starter, 4 failure, 5 injected
        int sensor;
        msg::Message message{msg::InfoFree{0, {}}};
        proto::TimerKey timer{};
        double timer_deadline = 0.0;
        long gen = 0;
        std::size_t cp = 0;
        double theta = 0.0;
        proto::Input injected{proto::TimerIn{}};
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t) return a.t > b.t;
            return a.seq > b.seq;
        }
    };

    Point position_at(const Sensor& s, double t) const;
    void sync_position(Sensor& s, double t);
    void dispatch(int id, const proto::Input& in, double t);
    void apply_effects(int id, proto::Effects&& eff, double t);
    void start_plan(Sensor& s, std::vector<proto::Checkpoint> plan, double t);
    void halt_motion(Sensor& s, double t);
    void schedule_next_waypoint(int id, Sensor& s, double t);
    void send_message(int id, const msg::Message& m, double t);
    void emit_snapshots_until(double t);
    void push(Event e);

    EngineConfig cfg_;
    proto::Context ctx_;
    std::map<int, Sensor> sensors_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::mt19937_64 starter_rng_;
    std::mt19937_64 medium_rng_;
    trace::Trace trace_;
    double next_snapshot_ = 0.0;
    double last_activity_ = 0.0;
};

}  // namespace pnp::engine
