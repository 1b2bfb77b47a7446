#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pnp/engine.hpp"
#include "pnp/scenario.hpp"
#include "pnp/trace.hpp"

using namespace pnp;
using geo::Point;

namespace {

engine::EngineConfig small_cfg() {
    engine::EngineConfig cfg;
    cfg.aoi = geo::Polygon{{{-100, -100}, {180, -100}, {180, 180}, {-100, 180}}};
    cfg.max_time = 300.0;
    return cfg;
}

std::string trace_text(const trace::Trace& t) {
    std::ostringstream os;
    trace::write(t, os);
    return os.str();
}

long count_sends_from(const trace::Trace& t, int id) {
    long n = 0;
    for (const auto& r : t.records)
        if (const auto* m = std::get_if<trace::MsgSend>(&r))
            if (m->from == id) ++n;
    return n;
}

}  // namespace

TEST_CASE("two executions of the same scenario and seed are byte-identical") {
    scenario::ScenarioConfig cfg = scenario::preset("center80");
    cfg.n_sensors = 30;
    const trace::Trace a = scenario::run_scenario(cfg, 5);
    const trace::Trace b = scenario::run_scenario(cfg, 5);
    CHECK(trace_text(a) == trace_text(b));
}

TEST_CASE("radio range is honest around r_tx = 11") {
    for (double dx : {10.9, 11.1}) {
        engine::Engine eng(small_cfg());
        eng.add_sensor(0, {40, 40}, 1e4);
        eng.add_sensor(1, {40 + dx, 40}, 1e4);
        eng.inject(0, proto::Input{proto::StarterIn{0.0}}, 0.5);
        const trace::Trace t = eng.run();
        if (dx < 11.0)
            CHECK(count_sends_from(t, 1) > 0);  // heard the announcement, reacted
        else
            CHECK(count_sends_from(t, 1) == 0);  // out of range, stayed silent
    }
}

TEST_CASE("message latency sits inside [base, base + jitter]") {
    engine::Engine eng(small_cfg());
    eng.add_sensor(0, {40, 40}, 1e4);
    eng.add_sensor(1, {47, 41}, 1e4);
    eng.inject(0, proto::Input{proto::StarterIn{0.0}}, 0.5);
    const trace::Trace t = eng.run();
    // first send is the announcement, the next send by sensor 1 is its reaction
    double t_ias = -1.0, t_reply = -1.0;
    for (const auto& r : t.records) {
        const auto* m = std::get_if<trace::MsgSend>(&r);
        if (!m) continue;
        if (m->from == 0 && t_ias < 0) t_ias = m->t;
        if (m->from == 1 && t_reply < 0) t_reply = m->t;
    }
    REQUIRE(t_ias >= 0);
    REQUIRE(t_reply >= 0);
    const double lat = t_reply - t_ias;
    CHECK(lat >= 0.010);
    CHECK(lat <= 0.015 + 1e-12);
}

TEST_CASE("motion records honor the configured speed exactly") {
    engine::Engine eng(small_cfg());
    eng.add_sensor(0, {40, 40}, 1e4);
    eng.add_sensor(1, {47, 41}, 1e4);  // outside the starter hexagon: gets pulled in
    eng.inject(0, proto::Input{proto::StarterIn{0.2}}, 0.5);
    const trace::Trace t = eng.run();
    std::map<int, double> begin_t;
    std::map<int, Point> begin_p;
    int segments = 0;
    for (const auto& r : t.records) {
        if (const auto* mb = std::get_if<trace::MotionBegin>(&r)) {
            begin_t[mb->id] = mb->t;
            begin_p[mb->id] = mb->from;
        } else if (const auto* me = std::get_if<trace::MotionEnd>(&r)) {
            REQUIRE(begin_t.count(me->id) == 1);
            const double dt = me->t - begin_t[me->id];
            CHECK(std::abs(dt - me->dist / 1.0) < 1e-9);
            begin_t.erase(me->id);
            ++segments;
        }
    }
    CHECK(segments > 0);  // the scenario did move somebody
}

TEST_CASE("a lone starter advertises, finds nobody, and the run quiesces") {
    engine::Engine eng(small_cfg());
    eng.add_sensor(0, {40, 40}, 1e4);
    eng.inject(0, proto::Input{proto::StarterIn{0.0}}, 0.25);
    const trace::Trace t = eng.run();
    long sends = 0;
    bool quiesced = false;
    double end_t = -1.0;
    for (const auto& r : t.records) {
        if (std::holds_alternative<trace::MsgSend>(r)) ++sends;
        CHECK(!std::holds_alternative<trace::MotionBegin>(r));
        if (const auto* e = std::get_if<trace::End>(&r)) {
            quiesced = e->quiesced;
            end_t = e->t;
        }
    }
    CHECK(sends == 2);  // the announcement and one cardinality report
    CHECK(quiesced);
    CHECK(end_t < 300.0);
    CHECK(eng.sensor_state(0).role == proto::Role::Snapped);
}

TEST_CASE("per-attempt loss with retries matches the expected delivery rate") {
    // P(delivered) = 1 - loss^(retries+1); estimate it over many tiny runs
    auto delivered_fraction = [](double loss, int retries, int runs) {
        int got = 0;
        for (int k = 0; k < runs; ++k) {
            engine::EngineConfig cfg = small_cfg();
            cfg.max_time = 30.0;
            cfg.medium.loss = loss;
            cfg.medium.retries = retries;
            cfg.seed = 1000 + k;
            engine::Engine eng(cfg);
            eng.add_sensor(0, {40, 40}, 1e4);
            eng.add_sensor(1, {50, 40}, 1e4);
            eng.inject(0, proto::Input{proto::StarterIn{0.0}}, 0.5);
            const trace::Trace t = eng.run();
            bool reacted = false;
            for (const auto& r : t.records)
                if (const auto* m = std::get_if<trace::MsgSend>(&r))
                    if (m->from == 1 && m->t < 1.0) reacted = true;
            if (reacted) ++got;
        }
        return static_cast<double>(got) / runs;
    };
    const double lossy = delivered_fraction(0.5, 0, 400);
    CHECK(lossy > 0.40);
    CHECK(lossy < 0.60);
    const double robust = delivered_fraction(0.3, 3, 400);  // 1 - 0.3^4 = 0.9919
    CHECK(robust > 0.96);
}

TEST_CASE("failure injection silences a sensor from the failure instant on") {
    engine::EngineConfig cfg = small_cfg();
    cfg.failures = {{0, 2.0}};
    engine::Engine eng(cfg);
    eng.add_sensor(0, {40, 40}, 1e4);
    eng.add_sensor(1, {50, 40}, 1e4);
    eng.inject(0, proto::Input{proto::StarterIn{0.0}}, 0.5);
    const trace::Trace t = eng.run();
    bool saw_failure = false;
    for (const auto& r : t.records) {
        if (const auto* f = std::get_if<trace::Failure>(&r)) {
            CHECK(f->id == 0);
            CHECK(f->t == 2.0);
            saw_failure = true;
        }
        if (const auto* m = std::get_if<trace::MsgSend>(&r)) CHECK((m->from != 0 || m->t < 2.0));
    }
    CHECK(saw_failure);
}

TEST_CASE("energy bookkeeping: spent = sum of initial minus residual") {
    scenario::ScenarioConfig cfg = scenario::preset("center80");
    cfg.n_sensors = 20;
    cfg.max_time = 600.0;
    const trace::Trace t = scenario::run_scenario(cfg, 2);
    double spent = -1.0;
    double moved = 0.0;
    long sends = 0;
    for (const auto& r : t.records) {
        if (const auto* e = std::get_if<trace::End>(&r)) spent = e->energy_spent;
        if (const auto* me = std::get_if<trace::MotionEnd>(&r)) moved += me->dist;
        if (std::holds_alternative<trace::MsgSend>(r)) ++sends;
    }
    REQUIRE(spent >= 0.0);
    // motion energy alone is a lower bound, motion + all-pairs rx an upper one
    CHECK(spent >= moved * t.header.e_motion - 1e-6);
    CHECK(spent <= moved * t.header.e_motion +
                       sends * (t.header.e_tx + 20 * t.header.e_rx) + 1e-6);
}
