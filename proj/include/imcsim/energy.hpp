//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "imcsim/schedule.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace imcsim {

/// Technology scaling: power scales by a*b^2, area by a.
struct ScalingFactors {
    double a = 1.0;
    double b = 1.0;
};

double scale_power(double watts, ScalingFactors s);
double scale_area(double mm2, ScalingFactors s);

/// Per-block power in watts, keyed by activity label.
struct PowerProfile {
    std::string label;
    std::map<std::string, double> watts;
    /// Area of one crossbar IMA in mm^2.
    double ima_area_mm2 = 0.83;

    double power(std::string_view block) const;
};

/// Labels every profile must define.
const std::vector<std::string>& required_power_blocks();

/// JSON form:
///   {"label": ..., "ima_area_mm2": ..., "powers_w": {block: watts, ...},
///    "scaling": {"a": ..., "b": ..., "blocks": [block, ...]}}
/// Blocks listed under "scaling" are scaled with scale_power at load time.
PowerProfile parse_profile(std::string_view json_text);
PowerProfile load_profile(const std::filesystem::path& path);

struct LayerEnergy {
    std::string layer;
    double seconds = 0.0;
    double joules = 0.0;
    std::map<std::string, double> per_block;
};

struct EnergyReport {
    std::string profile;
    std::vector<LayerEnergy> layers;
    std::map<std::string, double> per_block;
    double total_joules = 0.0;
    double total_seconds = 0.0;
};

/// Sum of power(block) * duration over every activity of the timeline.
EnergyReport timeline_energy(const Timeline& timeline, const PowerProfile& profile);

struct Efficiency {
    double gops = 0.0;
    double tops_per_w = 0.0;  // infinite for a zero-energy run
    double gops_per_mm2 = 0.0;
    double average_power_w = 0.0;
};

Efficiency efficiency_metrics(double ops, double seconds, double joules, double area_mm2);

/// Area of the crossbar arrays holding `cells` programmed cells.
double crossbar_area_mm2(std::int64_t cells, const PowerProfile& profile,
                         std::int64_t side = kCrossbarSide);
/// Two PCM devices per cell (differential weight encoding).
std::int64_t pcm_device_count(std::int64_t cells);

}  // namespace imcsim
