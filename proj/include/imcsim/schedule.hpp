//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "imcsim/nnspec.hpp"
#include "imcsim/tilepack.hpp"
#include "imcsim/timing.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace imcsim {

enum class StrategyKind { Cores, ImaAll, Hybrid, ImaDw };

/// Where each layer kind runs:
///   Cores   everything in software
///   ImaAll  weighted and depth-wise layers on the IMA (depth-wise with c_job)
///   Hybrid  weighted layers on the IMA, depth-wise on the cores after marshaling
///   ImaDw   weighted layers on the IMA, depth-wise on the DW accelerator
/// Residual adds always run on the cores.
struct Strategy {
    StrategyKind kind = StrategyKind::ImaDw;
    std::int64_t c_job = 16;

    std::string label() const;
};

/// Accepts cores, hybrid, ima_dw and ima_cjob<N>.
Strategy parse_strategy(std::string_view text);

enum class Unit { Ima, Dw, Cores };
std::string_view to_string(Unit unit);

/// Time one hardware block spends in a given state during a layer.
struct Activity {
    std::string block;
    double seconds = 0.0;
};

namespace blocks {
inline constexpr const char* kCoresActive = "cores_active";
inline constexpr const char* kCoresSleep = "cores_sleep";
inline constexpr const char* kImaCompute = "ima_compute";
inline constexpr const char* kImaStream = "ima_stream";
inline constexpr const char* kDwActive = "dw_active";
inline constexpr const char* kTcdm = "tcdm";
inline constexpr const char* kInterconnect = "interconnect";
}  // namespace blocks

struct LayerTiming {
    std::string layer;
    LayerKind kind = LayerKind::Conv2D;
    Unit unit = Unit::Cores;
    std::int64_t macs = 0;
    std::int64_t ops = 0;
    std::int64_t cycles = 0;
    double seconds = 0.0;
    PhaseBreakdown phases;
    std::int64_t marshal_cycles = 0;
    /// Cycles the cores spend summing partial results of row-split tiles.
    std::int64_t accumulate_cycles = 0;
    std::int64_t n_tiles = 0;
    std::vector<Activity> activities;
};

struct Timeline {
    std::string network;
    std::string strategy;
    double f_clk_hz = 0.0;
    std::vector<LayerTiming> layers;

    std::int64_t total_cycles() const;
    double total_seconds() const;
    std::int64_t total_macs() const;
    std::int64_t total_ops() const;
    /// Summed seconds per unit, indexed by Unit.
    double seconds_on(Unit unit) const;
};

struct ScheduleOptions {
    ExecModel model = ExecModel::Pipelined;
    /// Crossbar-eligibility of the first convolution and the classifier.
    PackOptions pack;
};

/// Runs the layers back to back in order. Throws SchedulingError naming the
/// layer when a strategy cannot map it (for instance an oversized c_job).
Timeline schedule_network(const NetworkSpec& net, const Strategy& strategy,
                          const ClusterConfig& cfg, const ScheduleOptions& options = {});

/// Convenience wrapper for a single bottleneck block.
Timeline bottleneck_schedule(const NetworkSpec& block, const Strategy& strategy,
                             const ClusterConfig& cfg);

}  // namespace imcsim
