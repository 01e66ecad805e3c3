//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/schedule.hpp"

#include "imcsim/errors.hpp"
#include "imcsim/mapping.hpp"

#include <cmath>
#include <stdexcept>

namespace imcsim {

namespace {

double to_seconds(std::int64_t cycles, const ClusterConfig& cfg) {
    return static_cast<double>(cycles) / cfg.f_clk_hz;
}

// Shared-memory and interconnect are billed for the whole layer.
void add_memory_activity(LayerTiming& t) {
    t.activities.push_back({blocks::kTcdm, t.seconds});
    t.activities.push_back({blocks::kInterconnect, t.seconds});
}

void run_on_cores(LayerTiming& t, const LayerSpec& layer, const TensorShape& input,
                  const ClusterConfig& cfg, bool marshal) {
    t.unit = Unit::Cores;
    t.cycles = sw_layer_cycles(layer, input, cfg.cores, marshal);
    t.marshal_cycles = marshal ? sw_marshal_cycles(input, cfg.cores) : 0;
    t.phases.compute = t.cycles - t.marshal_cycles;
    t.phases.overhead = t.marshal_cycles;
    t.phases.total = t.cycles;
    t.seconds = to_seconds(t.cycles, cfg);
    t.activities.push_back({blocks::kCoresActive, t.seconds});
    add_memory_activity(t);
}

void add_ima_time(LayerTiming& t, const LayerTime& lt) {
    t.phases.stream_in += lt.phases.stream_in;
    t.phases.compute += lt.phases.compute;
    t.phases.stream_out += lt.phases.stream_out;
    t.phases.overhead += lt.phases.overhead;
    t.phases.total += lt.phases.total;
}

void finish_ima(LayerTiming& t, const ClusterConfig& cfg) {
    t.unit = Unit::Ima;
    const std::int64_t ima_cycles = t.phases.total;
    t.cycles = ima_cycles + t.accumulate_cycles;
    t.seconds = to_seconds(t.cycles, cfg);
    t.activities.push_back({blocks::kImaCompute, to_seconds(t.phases.compute, cfg)});
    t.activities.push_back(
        {blocks::kImaStream, to_seconds(t.phases.stream_in + t.phases.stream_out, cfg)});
    t.activities.push_back({blocks::kCoresSleep, to_seconds(ima_cycles, cfg)});
    if (t.accumulate_cycles > 0)
        t.activities.push_back({blocks::kCoresActive, to_seconds(t.accumulate_cycles, cfg)});
    add_memory_activity(t);
}

// Every tile of the weight matrix is one job stream; row-split tiles produce
// partial sums that the cores add up.
void run_weighted_on_ima(LayerTiming& t, const LayerSpec& layer, const TensorShape& input,
                         const ClusterConfig& cfg, ExecModel model) {
    const MatrixDims dims = weight_matrix_dims(layer);
    const std::int64_t side = cfg.crossbar_side;
    const auto tiles = tile_layer(layer.name, dims.rows, dims.cols, side);
    for (const auto& tile : tiles) {
        const JobPlan plan = map_weight_tile(layer, input, {tile.h, tile.w}, tile.name);
        add_ima_time(t, ima_layer_time(plan, cfg, model));
    }
    t.n_tiles = static_cast<std::int64_t>(tiles.size());
    const std::int64_t row_tiles = (dims.rows + side - 1) / side;
    if (row_tiles > 1) {
        const double rate = cfg.cores.residual_elems_per_cycle;
        if (!(rate > 0)) throw ConfigError("residual_elems_per_cycle is not configured");
        const TensorShape out = output_shape(layer, input);
        const auto adds = (row_tiles - 1) * out.height * out.width * dims.cols;
        t.accumulate_cycles = static_cast<std::int64_t>(std::ceil(static_cast<double>(adds) / rate));
    }
    finish_ima(t, cfg);
}

void run_depthwise_on_ima(LayerTiming& t, const LayerSpec& layer, const TensorShape& input,
                          const ClusterConfig& cfg, ExecModel model, std::int64_t c_job) {
    const std::int64_t side = cfg.crossbar_side;
    const auto fail = [&](const std::string& why) {
        throw SchedulingError("layer '" + layer.name + "' cannot run on the IMA with c_job = " +
                              std::to_string(c_job) + ": " + why);
    };
    if (c_job < 1 || layer.out_channels % c_job != 0) fail("c_job does not divide the channels");
    if (layer.kernel * layer.kernel * c_job > side) fail("one job exceeds the crossbar rows");
    if (!depthwise_cjob_fits(layer, c_job, side)) fail("the blocks do not fit one crossbar");
    const auto [mapping, plan] = map_depthwise_cjob(layer, input, c_job, side);
    add_ima_time(t, ima_layer_time(plan, cfg, model));
    t.n_tiles = 1;
    finish_ima(t, cfg);
}

void run_on_dw(LayerTiming& t, const LayerSpec& layer, const TensorShape& input,
               const ClusterConfig& cfg) {
    const DwLayerResult r = dw_layer_cycles(layer, input, cfg);
    t.unit = Unit::Dw;
    t.phases = r.phases;
    t.cycles = r.cycles;
    t.seconds = to_seconds(t.cycles, cfg);
    t.activities.push_back({blocks::kDwActive, t.seconds});
    t.activities.push_back({blocks::kCoresSleep, t.seconds});
    add_memory_activity(t);
}

bool crossbar_eligible(const LayerSpec& layer, std::size_t index, const PackOptions& pack) {
    if (layer.kind == LayerKind::Conv2D && index == 0 && !pack.include_first_conv) return false;
    if (layer.kind == LayerKind::Linear && !pack.include_classifier) return false;
    return layer.uses_weights();
}

}  // namespace

std::string Strategy::label() const {
    switch (kind) {
        case StrategyKind::Cores: return "cores";
        case StrategyKind::ImaAll: return "ima_cjob" + std::to_string(c_job);
        case StrategyKind::Hybrid: return "hybrid";
        case StrategyKind::ImaDw: return "ima_dw";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view text) {
    if (text == "cores") return {StrategyKind::Cores, 0};
    if (text == "hybrid") return {StrategyKind::Hybrid, 0};
    if (text == "ima_dw") return {StrategyKind::ImaDw, 0};
    constexpr std::string_view prefix = "ima_cjob";
    if (text.starts_with(prefix) && text.size() > prefix.size()) {
        const std::string digits(text.substr(prefix.size()));
        std::size_t used = 0;
        long long c = 0;
        try {
            c = std::stoll(digits, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == digits.size() && c >= 1) return {StrategyKind::ImaAll, c};
    }
    throw ConfigError("unknown strategy '" + std::string(text) +
                      "' (expected cores, hybrid, ima_dw or ima_cjob<N>)");
}

std::string_view to_string(Unit unit) {
    switch (unit) {
        case Unit::Ima: return "ima";
        case Unit::Dw: return "dw";
        case Unit::Cores: return "cores";
    }
    return "unknown";
}

std::int64_t Timeline::total_cycles() const {
    std::int64_t c = 0;
    for (const auto& l : layers) c += l.cycles;
    return c;
}

double Timeline::total_seconds() const {
    double s = 0.0;
    for (const auto& l : layers) s += l.seconds;
    return s;
}

std::int64_t Timeline::total_macs() const {
    std::int64_t m = 0;
    for (const auto& l : layers) m += l.macs;
    return m;
}

std::int64_t Timeline::total_ops() const {
    std::int64_t o = 0;
    for (const auto& l : layers) o += l.ops;
    return o;
}

double Timeline::seconds_on(Unit unit) const {
    double s = 0.0;
    for (const auto& l : layers)
        if (l.unit == unit) s += l.seconds;
    return s;
}

Timeline schedule_network(const NetworkSpec& net, const Strategy& strategy,
                          const ClusterConfig& cfg, const ScheduleOptions& options) {
    validate_config(cfg);
    validate_network(net);
    const auto inputs = net.layer_inputs();

    Timeline tl;
    tl.network = net.name;
    tl.strategy = strategy.label();
    tl.f_clk_hz = cfg.f_clk_hz;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& layer = net.layers[i];
        const TensorShape& input = inputs[i];
        LayerTiming t;
        t.layer = layer.name;
        t.kind = layer.kind;
        t.macs = mac_count(layer, input);
        t.ops = op_count(layer, input);

        const bool on_cores_only = strategy.kind == StrategyKind::Cores;
        if (layer.kind == LayerKind::Residual || on_cores_only) {
            run_on_cores(t, layer, input, cfg, false);
        } else if (layer.kind == LayerKind::Depthwise) {
            switch (strategy.kind) {
                case StrategyKind::ImaAll:
                    run_depthwise_on_ima(t, layer, input, cfg, options.model, strategy.c_job);
                    break;
                case StrategyKind::ImaDw:
                    if (dw_supports(layer, cfg))
                        run_on_dw(t, layer, input, cfg);
                    else
                        run_on_cores(t, layer, input, cfg, true);
                    break;
                default:
                    run_on_cores(t, layer, input, cfg, true);
                    break;
            }
        } else if (crossbar_eligible(layer, i, options.pack)) {
            run_weighted_on_ima(t, layer, input, cfg, options.model);
        } else {
            run_on_cores(t, layer, input, cfg, false);
        }
        tl.layers.push_back(std::move(t));
    }
    return tl;
}

Timeline bottleneck_schedule(const NetworkSpec& block, const Strategy& strategy,
                             const ClusterConfig& cfg) {
    ScheduleOptions options;
    options.pack.include_first_conv = true;
    options.pack.include_classifier = true;
    return schedule_network(block, strategy, cfg, options);
}

}  // namespace imcsim
