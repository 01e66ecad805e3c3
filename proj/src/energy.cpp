//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/energy.hpp"

#include "imcsim/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace imcsim {

using nlohmann::json;

double scale_power(double watts, ScalingFactors s) { return watts * s.a * s.b * s.b; }

double scale_area(double mm2, ScalingFactors s) { return mm2 * s.a; }

double PowerProfile::power(std::string_view block) const {
    const auto it = watts.find(std::string(block));
    if (it == watts.end())
        throw ConfigError("power profile '" + label + "' has no entry for '" + std::string(block) + "'");
    return it->second;
}

const std::vector<std::string>& required_power_blocks() {
    static const std::vector<std::string> names = {
        blocks::kCoresActive, blocks::kCoresSleep, blocks::kImaCompute, blocks::kImaStream,
        blocks::kDwActive,    blocks::kTcdm,       blocks::kInterconnect,
    };
    return names;
}

namespace {

double finite_nonnegative(const json& v, const std::string& field) {
    if (!v.is_number()) throw ParseError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < 0) throw ConfigError(field + " must be finite and >= 0");
    return x;
}

}  // namespace

PowerProfile parse_profile(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("profile", e.what());
    }
    if (!j.is_object()) throw ParseError("profile", "expected an object");
    PowerProfile p;
    p.label = j.value("label", std::string("unnamed"));
    if (j.contains("ima_area_mm2")) p.ima_area_mm2 = finite_nonnegative(j["ima_area_mm2"], "ima_area_mm2");
    if (!j.contains("powers_w") || !j["powers_w"].is_object())
        throw ParseError("powers_w", "missing or not an object");
    for (const auto& [k, v] : j["powers_w"].items()) p.watts[k] = finite_nonnegative(v, "powers_w." + k);
    for (const auto& name : required_power_blocks())
        if (!p.watts.contains(name)) throw ConfigError("powers_w." + name + " is missing");

    if (j.contains("scaling")) {
        const auto& s = j["scaling"];
        if (!s.is_object()) throw ParseError("scaling", "expected an object");
        ScalingFactors f{finite_nonnegative(s.value("a", json(1.0)), "scaling.a"),
                         finite_nonnegative(s.value("b", json(1.0)), "scaling.b")};
        for (const auto& b : s.value("blocks", json::array())) {
            if (!b.is_string()) throw ParseError("scaling.blocks", "expected block names");
            const auto name = b.get<std::string>();
            if (!p.watts.contains(name)) throw ConfigError("scaling.blocks: unknown block '" + name + "'");
            p.watts[name] = scale_power(p.watts[name], f);
        }
    }
    return p;
}

PowerProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open power profile '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_profile(ss.str());
}

EnergyReport timeline_energy(const Timeline& timeline, const PowerProfile& profile) {
    EnergyReport r;
    r.profile = profile.label;
    for (const auto& layer : timeline.layers) {
        LayerEnergy e;
        e.layer = layer.layer;
        e.seconds = layer.seconds;
        for (const auto& a : layer.activities) {
            const double joules = profile.power(a.block) * a.seconds;
            e.per_block[a.block] += joules;
            e.joules += joules;
            r.per_block[a.block] += joules;
        }
        r.total_joules += e.joules;
        r.total_seconds += e.seconds;
        r.layers.push_back(std::move(e));
    }
    return r;
}

Efficiency efficiency_metrics(double ops, double seconds, double joules, double area_mm2) {
    if (!(seconds > 0)) throw UndefinedMetricError("efficiency is undefined for zero execution time");
    if (!(area_mm2 > 0)) throw UndefinedMetricError("area efficiency is undefined for zero area");
    Efficiency e;
    e.gops = ops / seconds / 1e9;
    e.average_power_w = joules / seconds;
    e.tops_per_w = joules > 0 ? ops / joules / 1e12 : std::numeric_limits<double>::infinity();
    e.gops_per_mm2 = e.gops / area_mm2;
    return e;
}

double crossbar_area_mm2(std::int64_t cells, const PowerProfile& profile, std::int64_t side) {
    return static_cast<double>(cells) / static_cast<double>(side * side) * profile.ima_area_mm2;
}

std::int64_t pcm_device_count(std::int64_t cells) { return 2 * cells; }

}  // namespace imcsim
