#include "pnp/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pnp::scenario {

namespace {

using nlohmann::json;

geo::Polygon rect(double x0, double y0, double x1, double y1) {
    return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

const std::set<std::string> kTopKeys = {
    "aoi",          "n_sensors",         "r_s",
    "r_tx",         "speed",             "distribution",
    "cluster",      "boundary",          "medium",
    "energy",       "delta_sub",         "failures",
    "max_time",     "snapshot_interval", "quiescence_window",
    "coverage_resolution", "coverage_threshold", "seed"};

void validate(ScenarioConfig& c) {
    if (c.aoi.vertices.size() < 3) throw std::runtime_error("aoi: need at least 3 vertices");
    if (!c.aoi.is_simple()) throw std::runtime_error("aoi: polygon self-intersects");
    if (c.n_sensors < 1) throw std::runtime_error("n_sensors must be >= 1");
    if (c.r_s <= 0 || c.r_tx <= 0 || c.speed <= 0)
        throw std::runtime_error("r_s, r_tx and speed must be positive");
    const double need = std::sqrt(3.0) * c.r_s;
    if (c.r_tx < need) {
        std::ostringstream w;
        w << "connectivity: r_tx=" << c.r_tx << " < sqrt(3)*r_s=" << need
          << "; adjacent snapped sensors may be unreachable";
        c.warnings.push_back(w.str());
    }
    if (c.distribution == Distribution::Cluster) {
        // the cluster disk must overlap the AoI somewhere
        bool ok = c.aoi.contains(c.cluster_center);
        for (int k = 0; k < 64 && !ok; ++k) {
            const double a = 2.0 * 3.14159265358979323846 * k / 64.0;
            ok = c.aoi.contains(c.cluster_center +
                                c.cluster_radius * geo::unit_dir(a));
        }
        if (!ok) throw std::runtime_error("cluster region does not intersect the aoi");
    }
    for (auto [id, t] : c.failures) {
        if (id < 0 || id >= c.n_sensors) throw std::runtime_error("failure: unknown sensor id");
        if (t < 0) throw std::runtime_error("failure: negative time");
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json j = json::parse(text);
    ScenarioConfig c;
    for (const auto& [key, val] : j.items())
        if (!kTopKeys.count(key)) throw std::runtime_error("unknown config key: " + key);
    if (!j.contains("aoi") || !j.contains("n_sensors"))
        throw std::runtime_error("config requires aoi and n_sensors");
    for (const auto& v : j.at("aoi")) {
        if (!v.is_array() || v.size() != 2)
            throw std::runtime_error("aoi: vertices are [x, y] pairs");
        c.aoi.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    c.n_sensors = j.at("n_sensors").get<int>();
    c.r_s = j.value("r_s", c.r_s);
    c.r_tx = j.value("r_tx", c.r_tx);
    c.speed = j.value("speed", c.speed);
    if (j.contains("distribution")) {
        const std::string d = j["distribution"].get<std::string>();
        if (d == "uniform-random") c.distribution = Distribution::UniformRandom;
        else if (d == "cluster") c.distribution = Distribution::Cluster;
        else if (d == "boundary-cluster") c.distribution = Distribution::BoundaryCluster;
        else throw std::runtime_error("unknown distribution: " + d);
    }
    if (j.contains("cluster")) {
        const auto& cl = j["cluster"];
        c.cluster_center = {cl.at("center")[0].get<double>(), cl.at("center")[1].get<double>()};
        c.cluster_radius = cl.value("radius", c.cluster_radius);
    }
    if (j.contains("boundary")) {
        const auto& b = j["boundary"];
        c.boundary_edge = b.value("edge", c.boundary_edge);
        c.boundary_depth = b.value("depth", c.boundary_depth);
    }
    if (j.contains("medium")) {
        const auto& m = j["medium"];
        c.medium.base_latency = m.value("base_latency", c.medium.base_latency);
        c.medium.jitter_max = m.value("jitter_max", c.medium.jitter_max);
        c.medium.loss = m.value("loss", c.medium.loss);
        c.medium.retries = m.value("retries", c.medium.retries);
        if (c.medium.loss < 0 || c.medium.loss >= 1)
            throw std::runtime_error("medium.loss must be in [0, 1)");
    }
    if (j.contains("energy")) {
        const auto& e = j["energy"];
        c.energy.initial = e.value("initial", c.energy.initial);
        c.energy.e_tx = e.value("e_tx", c.energy.e_tx);
        c.energy.e_rx = e.value("e_rx", c.energy.e_rx);
        c.energy.e_motion = e.value("e_motion", c.energy.e_motion);
    }
    c.delta_sub = j.value("delta_sub", c.delta_sub);
    if (j.contains("failures"))
        for (const auto& f : j["failures"])
            c.failures.push_back({f.at("sensor").get<int>(), f.at("time").get<double>()});
    c.max_time = j.value("max_time", c.max_time);
    c.snapshot_interval = j.value("snapshot_interval", c.snapshot_interval);
    c.quiescence_window = j.value("quiescence_window", c.quiescence_window);
    c.coverage_resolution = j.value("coverage_resolution", c.coverage_resolution);
    c.coverage_threshold = j.value("coverage_threshold", c.coverage_threshold);
    c.seed = j.value("seed", c.seed);
    validate(c);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::vector<std::string> preset_names() {
    return {"random80", "boundary80", "center80", "narrows"};
}

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig c;
    c.n_sensors = 150;
    if (name == "random80") {
        c.aoi = rect(0, 0, 80, 80);
        c.distribution = Distribution::UniformRandom;
    } else if (name == "boundary80") {
        c.aoi = rect(0, 0, 80, 80);
        c.distribution = Distribution::BoundaryCluster;
        c.boundary_edge = "left";
        c.boundary_depth = 10.0;
    } else if (name == "center80") {
        c.aoi = rect(0, 0, 80, 80);
        c.distribution = Distribution::Cluster;
        c.cluster_center = {40, 40};
        c.cluster_radius = 10.0;
    } else if (name == "narrows") {
        // two 40x40 squares joined by a 20 m long, 8 m wide corridor
        c.aoi.vertices = {{0, 0},   {40, 0},  {40, 16}, {60, 16}, {60, 0},  {100, 0},
                          {100, 40}, {60, 40}, {60, 24}, {40, 24}, {40, 40}, {0, 40}};
        c.distribution = Distribution::Cluster;
        c.cluster_center = {20, 20};
        c.cluster_radius = 15.0;
    } else {
        throw std::runtime_error("unknown preset: " + name);
    }
    validate(c);
    return c;
}

std::vector<std::tuple<int, Point, double>> generate_initial(const ScenarioConfig& cfg,
                                                             std::uint64_t seed) {
    std::seed_seq sq{seed, std::uint64_t{0x9E3779B97F4A7C15ULL}};
    std::mt19937_64 rng(sq);
    Point lo, hi;
    cfg.aoi.bounds(lo, hi);
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    geo::Polygon region = cfg.aoi;
    if (cfg.distribution == Distribution::BoundaryCluster) {
        Point rlo = lo, rhi = hi;
        if (cfg.boundary_edge == "left") rhi.x = lo.x + cfg.boundary_depth;
        else if (cfg.boundary_edge == "right") rlo.x = hi.x - cfg.boundary_depth;
        else if (cfg.boundary_edge == "bottom") rhi.y = lo.y + cfg.boundary_depth;
        else if (cfg.boundary_edge == "top") rlo.y = hi.y - cfg.boundary_depth;
        else throw std::runtime_error("unknown boundary edge: " + cfg.boundary_edge);
        region = rect(rlo.x, rlo.y, rhi.x, rhi.y);
    }

    std::vector<std::tuple<int, Point, double>> out;
    out.reserve(cfg.n_sensors);
    for (int id = 0; id < cfg.n_sensors; ++id) {
        Point p;
        for (int tries = 0;; ++tries) {
            if (tries > 1000000)
                throw std::runtime_error("placement rejection sampling did not converge");
            switch (cfg.distribution) {
                case Distribution::UniformRandom:
                    p = {ux(rng), uy(rng)};
                    break;
                case Distribution::Cluster: {
                    const double r = cfg.cluster_radius * std::sqrt(u01(rng));
                    const double a = 2.0 * 3.14159265358979323846 * u01(rng);
                    p = cfg.cluster_center + r * geo::unit_dir(a);
                    break;
                }
                case Distribution::BoundaryCluster:
                    p = {ux(rng), uy(rng)};
                    break;
            }
            if (cfg.aoi.contains(p) &&
                (cfg.distribution != Distribution::BoundaryCluster || region.contains(p)))
                break;
        }
        out.push_back({id, p, cfg.energy.initial});
    }
    return out;
}

engine::EngineConfig to_engine_config(const ScenarioConfig& cfg, std::uint64_t seed) {
    engine::EngineConfig ec;
    ec.aoi = cfg.aoi;
    ec.r_s = cfg.r_s;
    ec.r_tx = cfg.r_tx;
    ec.speed = cfg.speed;
    ec.medium = cfg.medium;
    ec.energy = cfg.energy;
    ec.delta_sub = cfg.delta_sub;
    ec.max_time = cfg.max_time;
    ec.snapshot_interval = cfg.snapshot_interval;
    ec.quiescence_window = cfg.quiescence_window;
    ec.coverage_resolution = cfg.coverage_resolution;
    ec.coverage_threshold = cfg.coverage_threshold;
    ec.failures = cfg.failures;
    ec.seed = seed;
    return ec;
}

trace::Trace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    engine::Engine eng(to_engine_config(cfg, seed));
    for (const auto& [id, pos, energy] : generate_initial(cfg, seed))
        eng.add_sensor(id, pos, energy);
    eng.schedule_starters();
    return eng.run();
}

}  // namespace pnp::scenario
