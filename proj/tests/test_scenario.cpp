#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pnp/scenario.hpp"

using namespace pnp;
using namespace pnp::scenario;
using geo::Point;

TEST_CASE("presets carry the documented deployment parameters") {
    for (const std::string& name : preset_names()) {
        const ScenarioConfig c = preset(name);
        CHECK(c.n_sensors == 150);
        CHECK(c.r_s == 5.0);
        CHECK(c.r_tx == 11.0);
        CHECK(c.speed == 1.0);
        CHECK(c.max_time == 2000.0);
        CHECK(c.aoi.is_simple());
        CHECK(c.warnings.empty());
    }
    CHECK(preset("center80").distribution == Distribution::Cluster);
    CHECK(preset("center80").cluster_center == Point{40, 40});
    CHECK(preset("boundary80").distribution == Distribution::BoundaryCluster);
    CHECK(preset("random80").aoi.area() == doctest::Approx(6400.0));
    CHECK(preset("narrows").aoi.vertices.size() == 12);
    CHECK_THROWS(preset("nope"));
}

TEST_CASE("config parsing: defaults, overrides, and rejection of bad input") {
    const ScenarioConfig c = parse_config(R"({
        "aoi": [[0,0],[50,0],[50,50],[0,50]],
        "n_sensors": 40,
        "r_tx": 12.5,
        "medium": {"loss": 0.1, "retries": 2},
        "failures": [{"sensor": 3, "time": 25.0}]
    })");
    CHECK(c.n_sensors == 40);
    CHECK(c.r_s == 5.0);          // default
    CHECK(c.r_tx == 12.5);        // override
    CHECK(c.medium.loss == 0.1);
    CHECK(c.medium.retries == 2);
    REQUIRE(c.failures.size() == 1);
    CHECK(c.failures[0].first == 3);
    CHECK(c.warnings.empty());

    CHECK_THROWS_WITH(parse_config(R"({"aoi": [[0,0],[50,0],[50,50],[0,50]],
                                       "n_sensors": 5, "typo_key": 1})"),
                      doctest::Contains("unknown config key"));
    CHECK_THROWS_WITH(parse_config(R"({"aoi": [[0,0],[50,0]], "n_sensors": 5})"),
                      doctest::Contains("at least 3 vertices"));
    CHECK_THROWS_WITH(parse_config(R"({"aoi": [[0,0],[50,50],[50,0],[0,50]],
                                       "n_sensors": 5})"),
                      doctest::Contains("self-intersects"));
    CHECK_THROWS_WITH(parse_config(R"({"aoi": [[0,0],[50,0],[50,50],[0,50]],
                                       "n_sensors": 5, "medium": {"loss": 1.0}})"),
                      doctest::Contains("loss"));
    CHECK_THROWS_WITH(parse_config(R"({"aoi": [[0,0],[50,0],[50,50],[0,50]],
                                       "n_sensors": 5,
                                       "failures": [{"sensor": 9, "time": 1.0}]})"),
                      doctest::Contains("unknown sensor id"));
    CHECK_THROWS(parse_config(R"({"n_sensors": 5})"));
}

TEST_CASE("a transmission radius below sqrt(3)*r_s only warns") {
    const ScenarioConfig c = parse_config(R"({
        "aoi": [[0,0],[50,0],[50,50],[0,50]],
        "n_sensors": 10,
        "r_tx": 8.0
    })");
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("connectivity") != std::string::npos);
}

TEST_CASE("initial placement stays inside the deployment region") {
    {
        const ScenarioConfig c = preset("center80");
        for (auto [id, p, e] : generate_initial(c, 7)) {
            CHECK(c.aoi.contains(p));
            CHECK(geo::distance(p, c.cluster_center) <= c.cluster_radius + 1e-12);
            CHECK(e == c.energy.initial);
        }
    }
    {
        const ScenarioConfig c = preset("boundary80");
        for (auto [id, p, e] : generate_initial(c, 7)) {
            CHECK(c.aoi.contains(p));
            CHECK(p.x <= c.boundary_depth);
        }
    }
    {
        const ScenarioConfig c = preset("random80");
        auto pts = generate_initial(c, 7);
        CHECK(pts.size() == 150);
        for (auto [id, p, e] : pts) CHECK(c.aoi.contains(p));
    }
}

TEST_CASE("placement is a pure function of (config, seed)") {
    const ScenarioConfig c = preset("narrows");
    const auto a = generate_initial(c, 11);
    const auto b = generate_initial(c, 11);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::get<0>(a[i]) == std::get<0>(b[i]));
        CHECK(std::get<1>(a[i]) == std::get<1>(b[i]));
    }
    const auto d = generate_initial(c, 12);
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(std::get<1>(a[i]) == std::get<1>(d[i]))) any_different = true;
    CHECK(any_different);
}

TEST_CASE("engine config inherits the scenario's radio and energy model") {
    ScenarioConfig c = preset("center80");
    c.medium.loss = 0.2;
    c.energy.e_motion = 2.5;
    const engine::EngineConfig ec = to_engine_config(c, 99);
    CHECK(ec.seed == 99);
    CHECK(ec.medium.loss == 0.2);
    CHECK(ec.energy.e_motion == 2.5);
    CHECK(ec.r_tx == c.r_tx);
    CHECK(ec.aoi.vertices.size() == c.aoi.vertices.size());
}
