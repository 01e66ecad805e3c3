#include <doctest.h>

#include "imcsim/errors.hpp"
#include "imcsim/timing.hpp"
#include "oracles/dw_trace.hpp"

#include <cmath>
#include <random>

using namespace imcsim;

namespace {

ClusterConfig at(double mhz, std::int64_t bus) {
    ClusterConfig c;
    c.f_clk_hz = mhz * 1e6;
    c.bus_width_bits = bus;
    return c;
}

LayerSpec depthwise(std::int64_t c, std::int64_t k = 3, std::int64_t stride = 1) {
    LayerSpec l;
    l.name = "dw";
    l.kind = LayerKind::Depthwise;
    l.kernel = k;
    l.stride = stride;
    l.in_channels = c;
    l.out_channels = c;
    return l;
}

JobPlan plan(std::int64_t n, std::int64_t in, std::int64_t out, std::int64_t rows, std::int64_t cols) {
    JobPlan p;
    p.layer = "p";
    p.n_jobs = n;
    p.in_bytes_per_job = in;
    p.out_bytes_per_job = out;
    p.rows_used = rows;
    p.cols_used = cols;
    p.cells_programmed = p.cells_nonzero = rows * cols;
    return p;
}

}  // namespace

TEST_CASE("job cycles") {
    CHECK(mvm_cycles(at(500, 128)) == 65);
    CHECK(mvm_cycles(at(250, 128)) == 33);
    const JobCycles j = ima_job_cycles(square_layer_plan(1.0, 1, 256), at(500, 128));
    CHECK(j.t_in == 16);
    CHECK(j.t_comp == 65);
    CHECK(j.t_out == 16);
    const JobCycles narrow = ima_job_cycles(plan(1, 27, 32, 27, 32), at(500, 32));
    CHECK(narrow.t_in == 7);
    CHECK(narrow.t_out == 8);
}

TEST_CASE("sequential and pipelined layer time") {
    const ClusterConfig cfg = at(500, 128);
    const JobPlan p = square_layer_plan(1.0, 1000, 256);
    const LayerTime seq = ima_layer_time(p, cfg, ExecModel::Sequential);
    CHECK(seq.phases.total == 173 + 1000 * (16 + 1 + 65 + 16));
    CHECK(seq.phases.stream_in == 16000);
    CHECK(seq.phases.compute == 65000);
    CHECK(seq.phases.stream_out == 16000);
    CHECK(seq.phases.overhead == 173 + 1000);

    const LayerTime pipe = ima_layer_time(p, cfg, ExecModel::Pipelined);
    // compute-bound: cfg + t_in + n*(t_comp + push) + t_out
    CHECK(pipe.phases.total == 173 + 16 + 1000 * (65 + 1) + 16);
    CHECK(pipe.seconds == doctest::Approx(pipe.phases.total / 500e6));
}

TEST_CASE("pipelined stream-bound schedule") {
    // 32-bit bus: t_in = t_out = 64, t_comp = 65 < 128.
    const ClusterConfig cfg = at(500, 32);
    const JobPlan p = square_layer_plan(1.0, 10, 256);
    const LayerTime pipe = ima_layer_time(p, cfg, ExecModel::Pipelined);
    const std::int64_t slots = 65 + 65 + 8 * 128;
    CHECK(pipe.phases.total == 173 + 10 + 64 + slots + 64);
}

TEST_CASE("single job cannot overlap") {
    const ClusterConfig cfg = at(500, 128);
    const JobPlan p = square_layer_plan(1.0, 1, 256);
    const auto seq = ima_layer_time(p, cfg, ExecModel::Sequential);
    const auto pipe = ima_layer_time(p, cfg, ExecModel::Pipelined);
    CHECK(pipe.phases.total == seq.phases.total);
    CHECK(pipe.phases.total >= 16 + 65 + 16);
}

TEST_CASE("sequential throughput gap") {
    const ClusterConfig cfg = at(500, 128);
    const JobPlan p = square_layer_plan(1.0, 100000, 256);
    const double ratio = ima_layer_time(p, cfg, ExecModel::Pipelined).gops /
                         ima_layer_time(p, cfg, ExecModel::Sequential).gops;
    CHECK(ratio == doctest::Approx(98.0 / 66.0).epsilon(0.01));
}

TEST_CASE("pipelined never exceeds sequential and stays under the roofline") {
    std::mt19937_64 rng(99);
    const std::vector<std::int64_t> buses = {32, 64, 96, 128, 256, 512};
    for (int trial = 0; trial < 10000; ++trial) {
        ClusterConfig cfg;
        cfg.f_clk_hz = std::uniform_real_distribution<double>(10e6, 2e9)(rng);
        cfg.bus_width_bits = buses[std::uniform_int_distribution<std::size_t>(0, buses.size() - 1)(rng)];
        cfg.t_mvm_s = std::uniform_real_distribution<double>(5e-9, 500e-9)(rng);
        cfg.cfg_cycles_per_layer = std::uniform_int_distribution<std::int64_t>(0, 2000)(rng);
        cfg.push_cycles = std::uniform_int_distribution<std::int64_t>(0, 4)(rng);
        const auto rows = std::uniform_int_distribution<std::int64_t>(1, 256)(rng);
        const auto cols = std::uniform_int_distribution<std::int64_t>(1, 256)(rng);
        const auto n = std::uniform_int_distribution<std::int64_t>(1, 5000)(rng);
        const JobPlan p = plan(n, rows, cols, rows, cols);
        const auto seq = ima_layer_time(p, cfg, ExecModel::Sequential);
        const auto pipe = ima_layer_time(p, cfg, ExecModel::Pipelined);
        REQUIRE(pipe.phases.total <= seq.phases.total);
        const double roof = plan_attainable(p, cfg) / 1e9;
        REQUIRE(seq.gops <= roof * (1 + 1e-9));
        REQUIRE(pipe.gops <= roof * (1 + 1e-9));
    }
}

TEST_CASE("stream fraction brackets the reported range on corner layers") {
    double lo = 1.0;
    double hi = 0.0;
    for (std::int64_t bus : {64, 128, 256, 512}) {
        for (double u : {0.05, 1.0}) {
            const double f = sequential_stream_fraction(square_layer_plan(u, 1, 256), at(500, bus));
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
    }
    CHECK(lo <= 0.08);
    CHECK(hi >= 0.40);
    const double full128 = sequential_stream_fraction(square_layer_plan(1.0, 1, 256), at(500, 128));
    CHECK(full128 == doctest::Approx(32.0 / 97.0));
}

TEST_CASE("halving the clock doubles stream time but not compute time") {
    const JobPlan p = square_layer_plan(0.5, 100, 256);
    const ClusterConfig fast = at(500, 128);
    const ClusterConfig slow = at(250, 128);
    const auto a = ima_layer_time(p, fast, ExecModel::Sequential);
    const auto b = ima_layer_time(p, slow, ExecModel::Sequential);
    CHECK(b.phases.stream_in / slow.f_clk_hz == doctest::Approx(2 * a.phases.stream_in / fast.f_clk_hz));
    CHECK(b.phases.stream_out / slow.f_clk_hz == doctest::Approx(2 * a.phases.stream_out / fast.f_clk_hz));
    const double ta = a.phases.compute / 100.0 / fast.f_clk_hz;
    const double tb = b.phases.compute / 100.0 / slow.f_clk_hz;
    CHECK(ta >= 130e-9 - 1e-15);
    CHECK(tb >= 130e-9 - 1e-15);
    CHECK(ta < 130e-9 + 1.0 / fast.f_clk_hz);
    CHECK(tb < 130e-9 + 1.0 / slow.f_clk_hz);
}

TEST_CASE("roofline values") {
    const ClusterConfig cfg = at(500, 128);
    const RooflinePoint peak = roofline_at(256, cfg);
    CHECK(peak.roof == doctest::Approx(2.0 * 256 * 256 / 130e-9));
    CHECK(std::round(peak.roof / 1e9) == 1008.0);
    const std::vector<double> us = {0.5};
    const auto half = roofline_utilization(cfg, us);
    CHECK(half[0].intensity == doctest::Approx(128));
    CHECK(half[0].roof == doctest::Approx(252.06e9).epsilon(1e-4));
    CHECK(half[0].attainable == std::min(half[0].roof, half[0].bw_bound));

    CHECK(roofline_at(256, at(500, 32)).memory_bound);
    CHECK_FALSE(roofline_at(256, at(500, 64)).memory_bound);
    CHECK(roofline_at(256, at(250, 64)).memory_bound);
    CHECK_FALSE(roofline_at(256, at(250, 128)).memory_bound);
}

TEST_CASE("depth-wise accelerator on 28x28x16") {
    ClusterConfig cfg;
    cfg.dw.edge_clear_cycles = 0;
    const DwLayerResult r = dw_layer_cycles(depthwise(16), {28, 28, 16}, cfg);
    CHECK(r.cycles == 3397);
    CHECK(r.blocks == 1);
    CHECK(r.macs == 28 * 28 * 9 * 16);
    CHECK(r.macs_per_cycle == doctest::Approx(112896.0 / 3397.0));
    CHECK(r.memory_savings == doctest::Approx(1.0 - 90.0 / 252.0));
    CHECK(r.weight_bytes == 144);
    CHECK(r.memory_bytes == 28 * (144 + 27 * 48) + 144);
}

TEST_CASE("depth-wise accelerator errors and stride handling") {
    ClusterConfig cfg;
    CHECK_THROWS_AS(dw_layer_cycles(depthwise(16, 5), {8, 8, 16}, cfg), UnsupportedKindError);
    CHECK_THROWS_AS(dw_layer_cycles(depthwise(16, 3, 2), {8, 8, 16}, cfg), UnsupportedKindError);
    CHECK_FALSE(dw_supports(depthwise(16, 3, 2), cfg));
    cfg.dw.run_strided_layers = true;
    CHECK(dw_supports(depthwise(16, 3, 2), cfg));
    const auto strided = dw_layer_cycles(depthwise(16, 3, 2), {8, 8, 16}, cfg);
    const auto full = dw_layer_cycles(depthwise(16, 3, 1), {8, 8, 16}, cfg);
    CHECK(strided.cycles == full.cycles);
    CHECK(strided.macs == full.macs / 4);
}

TEST_CASE("depth-wise accelerator matches the loop trace") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 2000; ++trial) {
        oracle::DwTraceParams t;
        t.height = std::uniform_int_distribution<int>(1, 40)(rng);
        t.width = std::uniform_int_distribution<int>(1, 40)(rng);
        t.channels = std::uniform_int_distribution<int>(1, 100)(rng);
        t.weight_preload = std::uniform_int_distribution<int>(0, 20)(rng);
        t.window_preload = std::uniform_int_distribution<int>(0, 20)(rng);
        t.inner = std::uniform_int_distribution<int>(1, 8)(rng);
        t.edge_clear = std::uniform_int_distribution<int>(0, 12)(rng);
        ClusterConfig cfg;
        cfg.dw.weight_preload_cycles = t.weight_preload;
        cfg.dw.window_preload_cycles = t.window_preload;
        cfg.dw.inner_loop_cycles = t.inner;
        cfg.dw.edge_clear_cycles = t.edge_clear;
        const auto want = oracle::trace_dw(t);
        const auto got = dw_layer_cycles(depthwise(t.channels), {t.height, t.width, t.channels}, cfg);
        REQUIRE(got.cycles == want.cycles);
        REQUIRE(got.streamed_input_bytes == want.input_bytes);
        REQUIRE(got.weight_bytes == want.weight_bytes);
        REQUIRE(got.naive_input_bytes == want.window_fetch_bytes);
        if (t.inner >= 4) {
            REQUIRE(got.macs_per_cycle <= 36.0);
        }
        REQUIRE(got.macs <= want.mac_slots);
    }
}

TEST_CASE("software cycles") {
    CoreConfig cores;
    LayerSpec res;
    res.name = "res";
    res.kind = LayerKind::Residual;
    res.in_channels = res.out_channels = 64;
    CHECK(sw_layer_cycles(res, {14, 14, 64}, cores, false) == 3136);

    LayerSpec pw;
    pw.name = "pw";
    pw.kind = LayerKind::Pointwise;
    pw.in_channels = 16;
    pw.out_channels = 32;
    CHECK(sw_layer_cycles(pw, {4, 4, 16}, cores, false) == 4 * 4 * 16 * 32 / 16);
    CHECK(sw_layer_cycles(pw, {4, 4, 16}, cores, true) == 4 * 4 * 16 * 32 / 16 + 64);
    CHECK(sw_marshal_cycles({4, 4, 16}, cores) == 64);

    const auto dw = depthwise(16);
    CHECK(sw_layer_cycles(dw, {8, 8, 16}, cores, false) ==
          static_cast<std::int64_t>(std::ceil(8 * 8 * 9 * 16 / 1.14)));

    cores.dw_macs_per_cycle = 0;
    CHECK_THROWS_AS(sw_layer_cycles(dw, {8, 8, 16}, cores, false), ConfigError);
}

TEST_CASE("config validation") {
    ClusterConfig cfg;
    CHECK_NOTHROW(validate_config(cfg));
    cfg.bus_width_bits = 48;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = {};
    cfg.f_clk_hz = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = {};
    cfg.dw.inner_loop_cycles = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}
