//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/timing.hpp"

#include "imcsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace imcsim {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// ceil() that ignores floating-point noise just above an integer (130ns*500MHz).
std::int64_t ceil_cycles(double x) { return static_cast<std::int64_t>(std::ceil(x - 1e-9)); }

std::int64_t bus_cycles(std::int64_t bytes, const ClusterConfig& cfg) {
    return ceil_cycles(static_cast<double>(bytes) / cfg.bus_bytes_per_cycle());
}

}  // namespace

void validate_config(const ClusterConfig& cfg) {
    if (!(cfg.f_clk_hz > 0)) throw ConfigError("f_clk must be positive");
    if (cfg.bus_width_bits <= 0 || cfg.bus_width_bits % 32 != 0)
        throw ConfigError("bus width must be a positive multiple of 32 bits");
    if (!(cfg.t_mvm_s > 0)) throw ConfigError("t_mvm must be positive");
    if (cfg.crossbar_side < 1) throw ConfigError("crossbar side must be >= 1");
    if (cfg.cfg_cycles_per_layer < 0 || cfg.push_cycles < 0)
        throw ConfigError("configuration and push cycles must be >= 0");
    const auto& dw = cfg.dw;
    if (!(dw.bytes_per_cycle > 0) || dw.channels_per_block < 1 || dw.macs_per_cycle_peak < 1 ||
        dw.inner_loop_cycles < 1 || dw.weight_preload_cycles < 0 || dw.window_preload_cycles < 0 ||
        dw.edge_clear_cycles < 0)
        throw ConfigError("invalid depth-wise accelerator configuration");
    if (cfg.cores.n_cores < 1) throw ConfigError("n_cores must be >= 1");
}

std::int64_t mvm_cycles(const ClusterConfig& cfg) { return ceil_cycles(cfg.t_mvm_s * cfg.f_clk_hz); }

JobCycles ima_job_cycles(const JobPlan& plan, const ClusterConfig& cfg) {
    return {bus_cycles(plan.in_bytes_per_job, cfg), mvm_cycles(cfg),
            bus_cycles(plan.out_bytes_per_job, cfg)};
}

std::string_view to_string(ExecModel model) {
    return model == ExecModel::Sequential ? "sequential" : "pipelined";
}

LayerTime ima_layer_time(const JobPlan& plan, const ClusterConfig& cfg, ExecModel model) {
    const JobCycles j = ima_job_cycles(plan, cfg);
    const std::int64_t n = plan.n_jobs;
    LayerTime t;
    t.phases.stream_in = n * j.t_in;
    t.phases.compute = n * j.t_comp;
    t.phases.stream_out = n * j.t_out;
    t.phases.overhead = cfg.cfg_cycles_per_layer + n * cfg.push_cycles;

    if (model == ExecModel::Sequential) {
        t.phases.total = t.phases.overhead + n * (j.t_in + j.t_comp + j.t_out);
    } else {
        std::int64_t slots = 0;
        if (n == 1) {
            slots = j.t_comp;
        } else {
            // First slot only prefetches, last slot only drains, the rest do both.
            slots = std::max(j.t_comp, j.t_in) + std::max(j.t_comp, j.t_out) +
                    (n - 2) * std::max(j.t_comp, j.t_in + j.t_out);
        }
        t.phases.total = t.phases.overhead + j.t_in + slots + j.t_out;
    }
    t.seconds = static_cast<double>(t.phases.total) / cfg.f_clk_hz;
    t.gops = t.seconds > 0 ? static_cast<double>(plan.ops_per_job() * n) / t.seconds / 1e9 : 0.0;
    return t;
}

double sequential_stream_fraction(const JobPlan& plan, const ClusterConfig& cfg) {
    const JobCycles j = ima_job_cycles(plan, cfg);
    return static_cast<double>(j.t_in + j.t_out) / static_cast<double>(j.t_in + j.t_comp + j.t_out);
}

bool dw_supports(const LayerSpec& layer, const ClusterConfig& cfg) {
    return layer.kind == LayerKind::Depthwise && layer.kernel == 3 &&
           (layer.stride == 1 || cfg.dw.run_strided_layers);
}

DwLayerResult dw_layer_cycles(const LayerSpec& layer, const TensorShape& input,
                              const ClusterConfig& cfg) {
    if (layer.kind != LayerKind::Depthwise)
        throw UnsupportedKindError("layer '" + layer.name + "' is not depth-wise");
    if (layer.kernel != 3)
        throw UnsupportedKindError("the depth-wise accelerator is hardwired to 3x3 filters; layer '" +
                                   layer.name + "' has k = " + std::to_string(layer.kernel));
    if (layer.stride != 1 && !cfg.dw.run_strided_layers)
        throw UnsupportedKindError("the depth-wise accelerator only supports stride 1; layer '" +
                                   layer.name + "' has stride " + std::to_string(layer.stride));
    const DwConfig& dw = cfg.dw;

    // The datapath always scans at stride 1, so the scanned plane has the input size.
    const std::int64_t rows = input.height;
    const std::int64_t cols = input.width;
    const std::int64_t ch = dw.channels_per_block;
    const std::int64_t k2 = layer.kernel * layer.kernel;

    DwLayerResult r;
    r.blocks = ceil_div(layer.out_channels, ch);
    r.phases.stream_in = r.blocks * (dw.weight_preload_cycles + cols * dw.window_preload_cycles);
    r.phases.compute = r.blocks * cols * rows * dw.inner_loop_cycles;
    r.phases.overhead = r.blocks * (cols - 1) * dw.edge_clear_cycles;
    r.phases.total = r.phases.stream_in + r.phases.compute + r.phases.overhead;
    r.cycles = r.phases.total;
    r.macs = mac_count(layer, input);
    r.macs_per_cycle = r.cycles ? static_cast<double>(r.macs) / static_cast<double>(r.cycles) : 0.0;

    // One full window per column, then one new input row per vertical slide.
    r.streamed_input_bytes = r.blocks * ch * cols * (k2 + layer.kernel * (rows - 1));
    r.weight_bytes = r.blocks * ch * k2;
    r.memory_bytes = r.streamed_input_bytes + r.weight_bytes;
    r.naive_input_bytes = r.blocks * ch * rows * cols * k2;
    r.memory_savings = 1.0 - static_cast<double>(r.streamed_input_bytes) /
                                 static_cast<double>(r.naive_input_bytes);
    return r;
}

std::int64_t sw_marshal_cycles(const TensorShape& input, const CoreConfig& cores) {
    if (!(cores.marshal_cycles_per_elem > 0))
        throw ConfigError("marshal_cycles_per_elem is not configured");
    return ceil_cycles(static_cast<double>(input.elements()) * cores.marshal_cycles_per_elem);
}

std::int64_t sw_layer_cycles(const LayerSpec& layer, const TensorShape& input,
                             const CoreConfig& cores, bool marshal) {
    double rate = 0.0;
    const char* rate_name = "";
    switch (layer.kind) {
        case LayerKind::Conv2D:
        case LayerKind::Pointwise:
        case LayerKind::Linear:
            rate = cores.pw_macs_per_cycle;
            rate_name = "pw_macs_per_cycle";
            break;
        case LayerKind::Depthwise:
            rate = cores.dw_macs_per_cycle;
            rate_name = "dw_macs_per_cycle";
            break;
        case LayerKind::Residual:
            rate = cores.residual_elems_per_cycle;
            rate_name = "residual_elems_per_cycle";
            break;
    }
    if (!(rate > 0)) throw ConfigError(std::string(rate_name) + " is not configured");
    const std::int64_t work = mac_count(layer, input);
    std::int64_t cycles = ceil_cycles(static_cast<double>(work) / rate);
    if (marshal) cycles += sw_marshal_cycles(input, cores);
    return cycles;
}

RooflinePoint roofline_at(double intensity, const ClusterConfig& cfg) {
    RooflinePoint p;
    p.intensity = intensity;
    p.utilization = intensity / static_cast<double>(cfg.crossbar_side);
    p.roof = 2.0 * intensity * intensity / cfg.t_mvm_s;
    p.bw_bound = cfg.bus_bytes_per_cycle() * cfg.f_clk_hz * intensity;
    p.attainable = std::min(p.roof, p.bw_bound);
    p.memory_bound = p.bw_bound < p.roof;
    return p;
}

std::vector<RooflinePoint> roofline(const ClusterConfig& cfg, std::span<const double> intensities) {
    std::vector<RooflinePoint> out;
    out.reserve(intensities.size());
    for (double i : intensities) out.push_back(roofline_at(i, cfg));
    return out;
}

JobPlan square_layer_plan(double utilization, std::int64_t n_jobs, std::int64_t side) {
    const std::int64_t dim =
        std::clamp<std::int64_t>(ceil_cycles(utilization * static_cast<double>(side)), 1, side);
    JobPlan plan;
    plan.layer = "square_" + std::to_string(dim);
    plan.n_jobs = n_jobs;
    plan.in_bytes_per_job = dim;
    plan.out_bytes_per_job = dim;
    plan.rows_used = dim;
    plan.cols_used = dim;
    plan.cells_programmed = dim * dim;
    plan.cells_nonzero = dim * dim;
    return plan;
}

std::vector<RooflinePoint> roofline_utilization(const ClusterConfig& cfg,
                                                std::span<const double> utilizations) {
    std::vector<RooflinePoint> out;
    out.reserve(utilizations.size());
    for (double u : utilizations) {
        const JobPlan plan = square_layer_plan(u, 1, cfg.crossbar_side);
        RooflinePoint p = roofline_at(plan_intensity(plan), cfg);
        p.utilization = u;
        out.push_back(p);
    }
    return out;
}

double plan_intensity(const JobPlan& plan) {
    return static_cast<double>(plan.ops_per_job()) /
           static_cast<double>(plan.in_bytes_per_job + plan.out_bytes_per_job);
}

double plan_attainable(const JobPlan& plan, const ClusterConfig& cfg) {
    const double roof = static_cast<double>(plan.ops_per_job()) / cfg.t_mvm_s;
    const double bw = cfg.bus_bytes_per_cycle() * cfg.f_clk_hz * plan_intensity(plan);
    return std::min(roof, bw);
}

}  // namespace imcsim
