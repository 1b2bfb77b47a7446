#include "pnp/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace pnp::engine {

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t channel) {
    std::seed_seq seq{seed, channel};
    return std::mt19937_64(seq);
}

}  // namespace

Engine::Engine(EngineConfig cfg)
    : cfg_(std::move(cfg)),
      starter_rng_(substream(cfg_.seed, 0xA11CE)),
      medium_rng_(substream(cfg_.seed, 0xBEEF)) {
    ctx_.aoi = &cfg_.aoi;
    ctx_.r_s = cfg_.r_s;
    ctx_.r_tx = cfg_.r_tx;
    ctx_.speed = cfg_.speed;
    ctx_.t_msg = cfg_.medium.base_latency + 0.99 * cfg_.medium.jitter_max;
    ctx_.delta_sub = cfg_.delta_sub;
    ctx_.e_motion = cfg_.energy.e_motion;

    trace_.header.seed = cfg_.seed;
    trace_.header.r_s = cfg_.r_s;
    trace_.header.r_tx = cfg_.r_tx;
    trace_.header.speed = cfg_.speed;
    trace_.header.max_time = cfg_.max_time;
    trace_.header.e_tx = cfg_.energy.e_tx;
    trace_.header.e_rx = cfg_.energy.e_rx;
    trace_.header.e_motion = cfg_.energy.e_motion;
    trace_.header.coverage_resolution = cfg_.coverage_resolution;
    trace_.header.coverage_threshold = cfg_.coverage_threshold;
    trace_.header.quiescence_window = cfg_.quiescence_window;
    trace_.header.aoi = cfg_.aoi.vertices;

    for (auto [id, t] : cfg_.failures) {
        Event e;
        e.t = t;
        e.kind = 4;
        e.sensor = id;
        push(std::move(e));
    }
}

void Engine::push(Event e) {
    e.seq = seq_++;
    queue_.push(std::move(e));
}

void Engine::add_sensor(int id, Point pos, double energy) {
    Sensor s;
    s.state.id = id;
    s.state.position = pos;
    s.state.energy = energy;
    s.initial_energy = energy;
    s.seg_start = pos;
    sensors_[id] = std::move(s);
    trace_.header.n_sensors = static_cast<int>(sensors_.size());
}

proto::SensorState& Engine::sensor_state(int id) { return sensors_.at(id).state; }
const proto::SensorState& Engine::sensor_state(int id) const {
    return sensors_.at(id).state;
}

void Engine::schedule_starters() {
    std::uniform_real_distribution<double> ut(0.0, cfg_.r_tx / cfg_.speed);
    std::uniform_real_distribution<double> uth(0.0, 1.0471975511965976);  // pi/3
    for (const auto& [id, s] : sensors_) {
        Event e;
        e.t = ut(starter_rng_);
        e.kind = 3;
        e.sensor = id;
        e.theta = uth(starter_rng_);
        push(std::move(e));
    }
}

void Engine::inject(int id, proto::Input in, double t) {
    Event e;
    e.t = t;
    e.kind = 5;
    e.sensor = id;
    e.injected = std::move(in);
    push(std::move(e));
}

Point Engine::position_at(const Sensor& s, double t) const {
    if (!s.moving || s.next_cp >= s.plan.size()) return s.state.position;
    const Point target = s.plan[s.next_cp].point;
    const double seg_len = geo::distance(s.seg_start, target);
    if (seg_len < 1e-12) return target;
    const double traveled = std::min((t - s.seg_start_t) * cfg_.speed, seg_len);
    return s.seg_start + (traveled / seg_len) * (target - s.seg_start);
}

void Engine::sync_position(Sensor& s, double t) {
    if (!s.moving) return;
    const Point p = position_at(s, t);
    const double d = geo::distance(s.state.position, p);
    s.state.position = p;
    s.total_distance += d;
    s.state.energy -= cfg_.energy.e_motion * d;
}

void Engine::schedule_next_waypoint(int id, Sensor& s, double t) {
    if (s.next_cp >= s.plan.size()) {
        if (s.moving) halt_motion(s, t);
        return;
    }
    s.seg_start = s.state.position;
    s.seg_start_t = t;
    const double d = geo::distance(s.state.position, s.plan[s.next_cp].point);
    Event e;
    e.t = t + d / cfg_.speed;
    e.kind = 2;
    e.sensor = id;
    e.gen = s.gen;
    e.cp = s.next_cp;
    push(std::move(e));
}

void Engine::start_plan(Sensor& s, std::vector<proto::Checkpoint> plan, double t) {
    sync_position(s, t);
    s.plan_start_dist = s.total_distance;
    s.gen += 1;
    s.plan = std::move(plan);
    s.next_cp = 0;
    s.moving = true;
    const Point to = s.plan.empty() ? s.state.position : s.plan.back().point;
    trace_.records.push_back(trace::MotionBegin{t, s.state.id, s.state.position, to});
    last_activity_ = std::max(last_activity_, t);
    schedule_next_waypoint(s.state.id, s, t);
}

void Engine::halt_motion(Sensor& s, double t) {
    sync_position(s, t);
    s.moving = false;
    s.gen += 1;
    s.plan.clear();
    s.next_cp = 0;
    trace_.records.push_back(trace::MotionEnd{t, s.state.id, s.state.position,
                                              s.total_distance - s.plan_start_dist});
    last_activity_ = std::max(last_activity_, t);
}

void Engine::send_message(int id, const msg::Message& m, double t) {
    Sensor& from = sensors_.at(id);
    from.state.energy -= cfg_.energy.e_tx;
    trace_.records.push_back(trace::MsgSend{t, id, msg::receiver_of(m),
                                            msg::variant_name(m), msg::payload_text(m)});
    last_activity_ = std::max(last_activity_, t);
    const Point src = from.state.position;
    std::uniform_real_distribution<double> uj(0.0, cfg_.medium.jitter_max);
    std::uniform_real_distribution<double> ul(0.0, 1.0);
    const std::optional<int> to = msg::receiver_of(m);
    for (auto& [rid, r] : sensors_) {
        if (rid == id) continue;
        if (to && *to != rid) continue;
        // reception set fixed at send time, from current positions
        if (!r.alive || geo::distance(src, position_at(r, t)) > cfg_.r_tx) continue;
        int attempts = 0;
        bool delivered = false;
        for (; attempts <= cfg_.medium.retries; ++attempts) {
            if (cfg_.medium.loss <= 0.0 || ul(medium_rng_) >= cfg_.medium.loss) {
                delivered = true;
                break;
            }
        }
        const double jitter = uj(medium_rng_);
        if (!delivered) continue;
        Event e;
        e.t = t + cfg_.medium.base_latency * (1 + attempts) + jitter;
        e.kind = 0;
        e.sensor = rid;
        e.message = m;
        push(std::move(e));
    }
}

void Engine::apply_effects(int id, proto::Effects&& eff, double t) {
    Sensor& s = sensors_.at(id);
    for (const proto::TimerKey& k : eff.cancel_timers) s.timers.erase(k);
    for (const auto& [k, deadline] : eff.set_timers) {
        s.timers[k] = deadline;
        Event e;
        e.t = deadline;
        e.kind = 1;
        e.sensor = id;
        e.timer = k;
        e.timer_deadline = deadline;
        push(std::move(e));
    }
    for (const msg::Message& m : eff.sends) send_message(id, m, t);
    if (eff.stop_motion && s.moving) halt_motion(s, t);
    if (eff.motion) start_plan(s, std::move(*eff.motion), t);
}

void Engine::dispatch(int id, const proto::Input& in, double t) {
    Sensor& s = sensors_.at(id);
    if (!s.alive) return;
    const proto::Role role_before = s.state.role;
    const auto frame_before = s.state.frame;
    proto::Effects eff = proto::step(s.state, in, t, ctx_);
    const bool frame_changed =
        frame_before.has_value() != s.state.frame.has_value() ||
        (frame_before && !frame_before->same_portion(*s.state.frame));
    if (s.state.role != role_before || frame_changed) {
        trace::RoleChange rc;
        rc.t = t;
        rc.id = id;
        rc.role = proto::role_name(s.state.role);
        rc.pos = s.state.position;
        if (s.state.frame) {
            rc.frame_ts = s.state.frame->starter_ts;
            rc.frame_starter = s.state.frame->starter_id;
            rc.frame_origin = s.state.frame->origin;
            rc.frame_theta = s.state.frame->theta;
        }
        trace_.records.push_back(std::move(rc));
        last_activity_ = std::max(last_activity_, t);
    }
    apply_effects(id, std::move(eff), t);
}

void Engine::emit_snapshots_until(double t) {
    while (next_snapshot_ <= t + 1e-12) {
        for (const auto& [id, s] : sensors_) {
            if (!s.alive) continue;
            trace_.records.push_back(trace::Snapshot{next_snapshot_, id,
                                                     position_at(s, next_snapshot_),
                                                     proto::role_name(s.state.role)});
        }
        next_snapshot_ += cfg_.snapshot_interval;
    }
}

trace::Trace Engine::run() {
    for (const auto& [id, s] : sensors_)
        trace_.records.push_back(
            trace::RoleChange{0.0, id, proto::role_name(s.state.role), s.state.position});
    emit_snapshots_until(0.0);
    bool quiesced = true;
    double t = 0.0;
    while (!queue_.empty()) {
        Event e = queue_.top();
        queue_.pop();
        if (e.t > cfg_.max_time) {
            quiesced = false;
            t = cfg_.max_time;
            break;
        }
        t = e.t;
        emit_snapshots_until(t);
        Sensor& s = sensors_.at(e.sensor);
        switch (e.kind) {
            case 0:  // delivery
                if (!s.alive) break;
                sync_position(s, t);
                s.state.energy -= cfg_.energy.e_rx;
                dispatch(e.sensor, proto::MsgIn{e.message}, t);
                break;
            case 1: {  // timer
                auto it = s.timers.find(e.timer);
                if (it == s.timers.end() || std::abs(it->second - e.timer_deadline) > 1e-12)
                    break;  // canceled or re-armed
                s.timers.erase(it);
                if (!s.alive) break;
                sync_position(s, t);
                dispatch(e.sensor, proto::TimerIn{e.timer}, t);
                break;
            }
            case 2: {  // waypoint
                if (!s.alive || !s.moving || e.gen != s.gen || e.cp != s.next_cp) break;
                const proto::Checkpoint cp = s.plan[s.next_cp];
                sync_position(s, t);
                s.state.position = cp.point;
                const long gen_before = s.gen;
                s.next_cp += 1;
                dispatch(e.sensor, proto::CheckpointIn{cp.tag, cp.tile}, t);
                if (s.gen == gen_before && s.moving) schedule_next_waypoint(e.sensor, s, t);
                break;
            }
            case 3:  // starter
                if (!s.alive) break;
                dispatch(e.sensor, proto::StarterIn{e.theta}, t);
                break;
            case 4:  // failure
                if (!s.alive) break;
                sync_position(s, t);
                s.alive = false;
                s.moving = false;
                s.timers.clear();
                trace_.records.push_back(trace::Failure{t, e.sensor});
                break;
            case 5:  // injected input
                if (!s.alive) break;
                sync_position(s, t);
                dispatch(e.sensor, e.injected, t);
                break;
        }
    }
    double spent = 0.0;
    for (const auto& [id, s] : sensors_) spent += s.initial_energy - s.state.energy;
    trace_.records.push_back(trace::End{t, quiesced, spent});
    return trace_;
}

}  // namespace pnp::engine
