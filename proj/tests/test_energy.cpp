#include <doctest.h>

#include "imcsim/config.hpp"
#include "imcsim/energy.hpp"
#include "imcsim/errors.hpp"

#include <cmath>

using namespace imcsim;

namespace {

PowerProfile flat(double watts) {
    PowerProfile p;
    p.label = "flat";
    for (const auto& b : required_power_blocks()) p.watts[b] = watts;
    return p;
}

Timeline two_layers() {
    Timeline t;
    t.f_clk_hz = 1e6;
    LayerTiming a;
    a.layer = "a";
    a.seconds = 2.0;
    a.activities = {{blocks::kImaCompute, 1.5}, {blocks::kCoresSleep, 2.0}};
    LayerTiming b;
    b.layer = "b";
    b.seconds = 1.0;
    b.activities = {{blocks::kCoresActive, 1.0}};
    t.layers = {a, b};
    return t;
}

}  // namespace

TEST_CASE("power and area scaling") {
    CHECK(scale_power(1.0, {0.5, 0.8}) == doctest::Approx(0.32));
    CHECK(scale_area(10.0, {0.5, 0.8}) == doctest::Approx(5.0));
    CHECK(scale_power(3.0, {}) == 3.0);
}

TEST_CASE("timeline energy sums power times duration") {
    PowerProfile p = flat(0.0);
    p.watts[blocks::kImaCompute] = 2.0;
    p.watts[blocks::kCoresSleep] = 0.5;
    p.watts[blocks::kCoresActive] = 3.0;
    const EnergyReport r = timeline_energy(two_layers(), p);
    REQUIRE(r.layers.size() == 2);
    CHECK(r.layers[0].joules == doctest::Approx(2.0 * 1.5 + 0.5 * 2.0));
    CHECK(r.layers[1].joules == doctest::Approx(3.0));
    CHECK(r.total_joules == doctest::Approx(7.0));
    CHECK(r.total_seconds == doctest::Approx(3.0));
    CHECK(r.per_block.at(blocks::kImaCompute) == doctest::Approx(3.0));
}

TEST_CASE("energy is additive over layers and blocks") {
    const Scenario s = load_scenario(IMCSIM_CONFIG_DIR "/cluster.json");
    const PowerProfile p = load_profile(IMCSIM_CONFIG_DIR "/profile_calibrated.json");
    const NetworkSpec net = load_network(IMCSIM_DATA_DIR "/mobilenetv2_224.json");
    const Timeline t = schedule_network(net, parse_strategy("ima_dw"), s.cluster, s.schedule);
    const EnergyReport r = timeline_energy(t, p);
    double by_layer = 0;
    for (const auto& l : r.layers) by_layer += l.joules;
    double by_block = 0;
    for (const auto& [k, v] : r.per_block) by_block += v;
    CHECK(by_layer == doctest::Approx(r.total_joules));
    CHECK(by_block == doctest::Approx(r.total_joules));
}

TEST_CASE("zero profile gives zero energy") {
    const PowerProfile zero = load_profile(IMCSIM_CONFIG_DIR "/profile_zero.json");
    const Scenario s = load_scenario(IMCSIM_CONFIG_DIR "/cluster.json");
    const NetworkSpec net = load_network(IMCSIM_DATA_DIR "/bottleneck.json");
    const Timeline t = bottleneck_schedule(net, parse_strategy("ima_dw"), s.cluster);
    const EnergyReport r = timeline_energy(t, zero);
    CHECK(r.total_joules == 0.0);
    const Efficiency e = efficiency_metrics(static_cast<double>(t.total_ops()), t.total_seconds(), 0.0, 1.0);
    CHECK(std::isinf(e.tops_per_w));
}

TEST_CASE("unknown activity label is a config error") {
    Timeline t = two_layers();
    t.layers[0].activities.push_back({"gpu", 1.0});
    CHECK_THROWS_AS(timeline_energy(t, flat(1.0)), ConfigError);
}

TEST_CASE("efficiency metrics") {
    const Efficiency e = efficiency_metrics(2e12, 1.0, 4.0, 0.83);
    CHECK(e.gops == doctest::Approx(2000));
    CHECK(e.tops_per_w == doctest::Approx(0.5));
    CHECK(e.average_power_w == doctest::Approx(4.0));
    CHECK(e.gops_per_mm2 == doctest::Approx(2000 / 0.83));
    CHECK_THROWS_AS(efficiency_metrics(1.0, 0.0, 1.0, 1.0), UndefinedMetricError);
    CHECK_THROWS_AS(efficiency_metrics(1.0, 1.0, 1.0, 0.0), UndefinedMetricError);
}

TEST_CASE("crossbar area and device count") {
    PowerProfile p = flat(0.0);
    p.ima_area_mm2 = 0.83;
    CHECK(crossbar_area_mm2(65536, p) == doctest::Approx(0.83));
    CHECK(crossbar_area_mm2(34 * 65536, p) == doctest::Approx(34 * 0.83));
    CHECK(pcm_device_count(65536) == 131072);
}

TEST_CASE("profile parsing") {
    const char* ok = R"({"label":"x","powers_w":{"cores_active":1,"cores_sleep":0.1,"ima_compute":2,
        "ima_stream":0.5,"dw_active":0.3,"tcdm":0.2,"interconnect":0.1},
        "scaling":{"a":0.5,"b":2,"blocks":["ima_compute"]}})";
    const PowerProfile p = parse_profile(ok);
    CHECK(p.power(blocks::kImaCompute) == doctest::Approx(4.0));
    CHECK(p.power(blocks::kCoresActive) == doctest::Approx(1.0));
    CHECK_THROWS_AS(p.power("nope"), ConfigError);
    CHECK_THROWS_AS(parse_profile(R"({"powers_w":{"cores_active":1}})"), ConfigError);
    CHECK_THROWS_AS(parse_profile(R"({"powers_w":{"cores_active":-1}})"), ConfigError);
    CHECK_THROWS_AS(parse_profile("[1,2"), ParseError);
    CHECK_THROWS_AS(load_profile("/nonexistent/profile.json"), IoError);
}
