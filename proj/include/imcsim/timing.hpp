//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "imcsim/mapping.hpp"
#include "imcsim/nnspec.hpp"
#include "imcsim/xbar.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace imcsim {

/// Depth-wise accelerator datapath parameters. Cycle counts are per 16-channel
/// block (weight preload) or per output column (window preload, edge clear).
struct DwConfig {
    double bytes_per_cycle = 16.0;
    std::int64_t channels_per_block = 16;
    std::int64_t macs_per_cycle_peak = 36;
    std::int64_t inner_loop_cycles = 4;
    std::int64_t weight_preload_cycles = 9;
    std::int64_t window_preload_cycles = 9;
    std::int64_t edge_clear_cycles = 1;
    /// Run stride != 1 layers on the stride-1 datapath and keep every
    /// stride-th output. Without it such layers fall back to the cores.
    bool run_strided_layers = false;
};

/// Throughput of the optimized parallel software kernels on the cores.
/// A non-positive rate means "not configured".
struct CoreConfig {
    std::int64_t n_cores = 8;
    double pw_macs_per_cycle = 16.0;
    double dw_macs_per_cycle = 1.14;
    double residual_elems_per_cycle = 4.0;
    double marshal_cycles_per_elem = 0.25;
};

struct ClusterConfig {
    double f_clk_hz = 500e6;
    std::int64_t bus_width_bits = 128;
    double t_mvm_s = 130e-9;
    std::int64_t crossbar_side = kCrossbarSide;
    std::int64_t cfg_cycles_per_layer = 173;
    std::int64_t push_cycles = 1;
    DwConfig dw;
    CoreConfig cores;

    double bus_bytes_per_cycle() const { return static_cast<double>(bus_width_bits) / 8.0; }
};

void validate_config(const ClusterConfig& cfg);

/// Cycle counts. `overhead` collects configuration and push cycles.
struct PhaseBreakdown {
    std::int64_t stream_in = 0;
    std::int64_t compute = 0;
    std::int64_t stream_out = 0;
    std::int64_t overhead = 0;
    std::int64_t total = 0;
};

// ---------------------------------------------------------------------------
// In-memory accelerator

struct JobCycles {
    std::int64_t t_in = 0;
    std::int64_t t_comp = 0;
    std::int64_t t_out = 0;
};

/// Cycles of one MVM at the cluster clock: ceil(t_mvm * f_clk).
std::int64_t mvm_cycles(const ClusterConfig& cfg);

JobCycles ima_job_cycles(const JobPlan& plan, const ClusterConfig& cfg);

enum class ExecModel { Sequential, Pipelined };
std::string_view to_string(ExecModel model);

struct LayerTime {
    PhaseBreakdown phases;
    double seconds = 0.0;
    double gops = 0.0;
};

/// Sequential: every job runs stream-in, push, compute, stream-out back to back.
///
/// Pipelined: while job i computes, the bus first streams in job i+1 (stream-in
/// has priority) and then streams out job i-1, so compute slot i lasts
/// max(t_comp, in(i+1) + out(i-1)) plus the push that advances the pipeline.
/// The first stream-in and the last stream-out are not hidden. In the
/// compute-bound regime this equals t_in + n*(t_comp + push) + t_out.
LayerTime ima_layer_time(const JobPlan& plan, const ClusterConfig& cfg, ExecModel model);

/// Fraction of a sequential job spent moving data: (t_in+t_out)/(t_in+t_comp+t_out).
double sequential_stream_fraction(const JobPlan& plan, const ClusterConfig& cfg);

// ---------------------------------------------------------------------------
// Depth-wise accelerator

struct DwLayerResult {
    std::int64_t cycles = 0;
    std::int64_t blocks = 0;
    std::int64_t macs = 0;
    double macs_per_cycle = 0.0;
    std::int64_t streamed_input_bytes = 0;
    std::int64_t weight_bytes = 0;
    std::int64_t memory_bytes = 0;  // streamed input + weights
    std::int64_t naive_input_bytes = 0;
    /// 1 - streamed input / (per-window fetch of every output pixel).
    double memory_savings = 0.0;
    PhaseBreakdown phases;
};

/// Loop-level model of the LD/MAC/ST datapath. For each block of channels:
/// weight preload, then per output column a window preload followed by one
/// inner loop per output row, with an edge clear between columns.
DwLayerResult dw_layer_cycles(const LayerSpec& layer, const TensorShape& input,
                              const ClusterConfig& cfg);

/// Whether the DW accelerator can run this layer under `cfg`.
bool dw_supports(const LayerSpec& layer, const ClusterConfig& cfg);

// ---------------------------------------------------------------------------
// Software cores

std::int64_t sw_layer_cycles(const LayerSpec& layer, const TensorShape& input,
                             const CoreConfig& cores, bool marshal);
/// Marshaling share of sw_layer_cycles (HWC -> CHW reordering of the input).
std::int64_t sw_marshal_cycles(const TensorShape& input, const CoreConfig& cores);

// ---------------------------------------------------------------------------
// Roofline

struct RooflinePoint {
    double utilization = 0.0;
    double intensity = 0.0;   // ops / byte
    double roof = 0.0;        // ops / s
    double bw_bound = 0.0;    // ops / s
    double attainable = 0.0;  // ops / s
    bool memory_bound = false;
};

/// Square-utilization family: the crossbar compute roof is 2*I^2/t_mvm.
RooflinePoint roofline_at(double intensity, const ClusterConfig& cfg);
std::vector<RooflinePoint> roofline(const ClusterConfig& cfg, std::span<const double> intensities);
/// rows = cols = ceil(u * side), so I = 2*side^2 / (2*side) = side.
std::vector<RooflinePoint> roofline_utilization(const ClusterConfig& cfg,
                                                std::span<const double> utilizations);

double plan_intensity(const JobPlan& plan);
/// min(compute roof of this plan's geometry, bandwidth * intensity).
double plan_attainable(const JobPlan& plan, const ClusterConfig& cfg);

/// Synthetic square point-wise layer used for the utilization sweep.
JobPlan square_layer_plan(double utilization, std::int64_t n_jobs, std::int64_t side);

}  // namespace imcsim
