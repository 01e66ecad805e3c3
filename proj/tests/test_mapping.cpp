#include <doctest.h>

#include "imcsim/errors.hpp"
#include "imcsim/mapping.hpp"
#include "oracles/integer_oracles.hpp"

#include <random>

using namespace imcsim;

namespace {

LayerSpec make(LayerKind kind, std::int64_t cin, std::int64_t cout, std::int64_t k = 1, std::int64_t s = 1) {
    LayerSpec l;
    l.name = "layer";
    l.kind = kind;
    l.kernel = k;
    l.stride = s;
    l.in_channels = cin;
    l.out_channels = cout;
    return l;
}

NetworkSpec bottleneck() { return load_network(IMCSIM_DATA_DIR "/bottleneck.json"); }

}  // namespace

TEST_CASE("im2col mapping of fitting layers") {
    const JobPlan p = map_standard_conv(make(LayerKind::Conv2D, 16, 64, 3), {32, 32, 16});
    CHECK(p.rows_used == 144);
    CHECK(p.cols_used == 64);
    CHECK(p.n_jobs == 1024);
    CHECK(p.in_bytes_per_job == 144);
    CHECK(p.out_bytes_per_job == 64);
    CHECK(p.cells_programmed == 144 * 64);
    CHECK(p.ops_per_job() == 2 * 144 * 64);

    const JobPlan full = map_standard_conv(make(LayerKind::Pointwise, 256, 256), {10, 10, 256});
    CHECK(full.utilization() == doctest::Approx(1.0));
    CHECK_NOTHROW(validate_plan(full));
}

TEST_CASE("oversized layers require tiling") {
    try {
        map_standard_conv(make(LayerKind::Pointwise, 320, 1280), {7, 7, 320});
        FAIL("expected TilingRequiredError");
    } catch (const TilingRequiredError& e) {
        CHECK(e.rows() == 320);
        CHECK(e.cols() == 1280);
    }
    CHECK_THROWS_AS(map_standard_conv(make(LayerKind::Depthwise, 8, 8, 3), {4, 4, 8}), UnsupportedKindError);
}

TEST_CASE("dense depth-wise mapping") {
    const auto cells = map_depthwise_dense(make(LayerKind::Depthwise, 64, 64, 3));
    CHECK(cells.programmed == 9 * 64 * 64);
    CHECK(cells.useful == 9 * 64);
    CHECK(cells.padding_ratio() == 64);
    CHECK_THROWS_AS(map_depthwise_dense(make(LayerKind::Pointwise, 4, 4)), UnsupportedKindError);
}

TEST_CASE("c_job depth-wise mapping examples") {
    const LayerSpec dw = make(LayerKind::Depthwise, 240, 240, 3);
    const auto [m, plan] = map_depthwise_cjob(dw, {16, 16, 240}, 16);
    CHECK(m.n_xbar_cells == 9 * 240 * 16);
    CHECK(m.jobs_per_pixel == 15);
    CHECK(m.true_weights == 9 * 240);
    CHECK(m.device_overhead() == doctest::Approx(16.0));
    CHECK(plan.n_jobs == 256 * 15);
    CHECK(plan.in_bytes_per_job == 144);
    CHECK(plan.out_bytes_per_job == 16);
    CHECK(depthwise_cjob_dims(dw, 16) == MatrixDims{2160, 16});
    CHECK(depthwise_cjob_fits(dw, 16));
    CHECK(depthwise_cjob_fits(dw, 8));
    CHECK_FALSE(depthwise_cjob_fits(dw, 32));
    CHECK_THROWS_AS(map_depthwise_cjob(dw, {16, 16, 240}, 7), ConfigError);
    CHECK_THROWS_AS(map_depthwise_cjob(dw, {16, 16, 240}, 48), CapacityError);
}

TEST_CASE("c_job formulas hold for random layers") {
    std::mt19937 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(1, 7)(rng);
        const std::int64_t c = std::uniform_int_distribution<std::int64_t>(1, 512)(rng);
        std::vector<std::int64_t> divisors;
        for (std::int64_t d = 1; d <= c; ++d)
            if (c % d == 0 && k * k * d <= kCrossbarSide) divisors.push_back(d);
        if (divisors.empty()) continue;
        const std::int64_t cj = divisors[std::uniform_int_distribution<std::size_t>(0, divisors.size() - 1)(rng)];
        const LayerSpec dw = make(LayerKind::Depthwise, c, c, k);
        const auto [m, plan] = map_depthwise_cjob(dw, {5, 5, c}, cj);
        REQUIRE(m.n_xbar_cells == k * k * c * cj);
        REQUIRE(m.jobs_per_pixel == c / cj);
        REQUIRE(plan.n_jobs == 25 * (c / cj));
        REQUIRE(plan.cells_nonzero == k * k * c);
        if (cj == c) REQUIRE(m.n_xbar_cells == map_depthwise_dense(dw).programmed);
        ++checked;
    }
    CHECK(checked > 10000);
}

TEST_CASE("occupancy statistics") {
    const JobPlan a = map_standard_conv(make(LayerKind::Pointwise, 256, 256), {2, 2, 256});
    const auto [m, b] = map_depthwise_cjob(make(LayerKind::Depthwise, 16, 16, 3), {2, 2, 16}, 16);
    const std::vector<JobPlan> plans = {a, b};
    const OccupancySummary s = occupancy_stats(plans);
    REQUIRE(s.utilization.size() == 2);
    CHECK(s.utilization[0] == doctest::Approx(1.0));
    CHECK(s.utilization[1] == doctest::Approx(9.0 * 16 * 16 / 65536.0));
    CHECK(s.cells_programmed == 65536 + 2304);
    CHECK(s.cells_nonzero == 65536 + 144);
    CHECK(s.padding_fraction == doctest::Approx(1.0 - (65536.0 + 144) / (65536.0 + 2304)));
}

TEST_CASE("bottleneck device increase") {
    const NetworkSpec net = bottleneck();
    const DeviceCount c8 = network_device_count(net, 8);
    const DeviceCount c16 = network_device_count(net, 16);
    const DeviceCount dense = network_device_count(net, 0);
    // 2*120*240 point-wise weights plus 9*240 depth-wise weights.
    CHECK(c8.true_weights == 2 * 120 * 240 + 9 * 240);
    CHECK(c8.increase() == doctest::Approx(7.0 * 2160 / 59760.0));
    CHECK(c16.increase() == doctest::Approx(15.0 * 2160 / 59760.0));
    CHECK(c8.increase() == doctest::Approx(0.25).epsilon(0.02));
    CHECK(c16.increase() == doctest::Approx(0.54).epsilon(0.01));
    CHECK(dense.cells == 2 * 120 * 240 + 9 * 240 * 240);
}

TEST_CASE("im2col lowering matches direct convolution") {
    std::mt19937 rng(3);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int trial = 0; trial < 300; ++trial) {
        oracle::Conv p{pick(1, 9), pick(1, 9), pick(1, 6), pick(1, 12), pick(1, 3) * 2 - 1, pick(1, 2)};
        if (p.k * p.k * p.cin > 256) continue;
        const LayerSpec layer = make(p.k == 1 ? LayerKind::Pointwise : LayerKind::Conv2D, p.cin, p.cout, p.k, p.stride);
        std::vector<int> in(static_cast<std::size_t>(p.h * p.w * p.cin));
        std::vector<int> w(static_cast<std::size_t>(p.cout * p.k * p.k * p.cin));
        Int8Tensor t({p.h, p.w, p.cin});
        for (std::size_t i = 0; i < in.size(); ++i) t.data[i] = static_cast<std::int8_t>(in[i] = pick(-128, 127));
        std::vector<std::int32_t> w32(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) w32[i] = w[i] = pick(-8, 7);
        const AdcScale s{pick(1, 64), 1};
        const Int8Tensor got = conv2d_on_crossbar(t, layer, w32, s);
        const auto want = oracle::conv2d(p, in, w, s.num, s.den);
        REQUIRE(got.data.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(static_cast<int>(got.data[i]) == want[i]);
    }
}
