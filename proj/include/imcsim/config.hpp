//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "imcsim/schedule.hpp"
#include "imcsim/timing.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace imcsim {

/// Cluster parameters plus the run options shared by the CLI commands.
struct Scenario {
    ClusterConfig cluster;
    ScheduleOptions schedule;
    std::int64_t n_ima_available = 34;
    std::int64_t roofline_jobs = 1000;
};

/// JSON form (every key optional, unknown keys rejected):
///   {"f_clk_mhz", "bus_width_bits", "t_mvm_ns", "crossbar_side",
///    "cfg_cycles_per_layer", "push_cycles",
///    "dw": {"bytes_per_cycle", "channels_per_block", "macs_per_cycle_peak",
///           "inner_loop_cycles", "weight_preload_cycles", "window_preload_cycles",
///           "edge_clear_cycles", "run_strided_layers"},
///    "cores": {"n_cores", "pw_macs_per_cycle", "dw_macs_per_cycle",
///              "residual_elems_per_cycle", "marshal_cycles_per_elem"},
///    "run": {"model", "include_first_conv", "include_classifier",
///            "n_ima_available", "roofline_jobs"}}
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& s);

/// Returns a copy with one dotted key (e.g. "dw.edge_clear_cycles") replaced.
Scenario with_override(const Scenario& s, std::string_view key, double value);

}  // namespace imcsim
