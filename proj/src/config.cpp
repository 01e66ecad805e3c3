//
// SPDX-License-Identifier: Apache-2.0
//

#include "imcsim/config.hpp"

#include "imcsim/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace imcsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
    for (const auto& [k, v] : obj.items())
        if (!known.contains(k))
            throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& field, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    if (!v.is_number()) throw ParseError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field + " must be finite");
    return x;
}

std::int64_t get_int(const json& obj, const std::string& key, const std::string& field,
                     std::int64_t fallback) {
    const double x = get_number(obj, key, field, static_cast<double>(fallback));
    if (x != std::floor(x)) throw ConfigError(field + " must be an integer");
    return static_cast<std::int64_t>(x);
}

bool get_bool(const json& obj, const std::string& key, const std::string& field, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw ParseError(field, "expected true or false");
    return obj[key].get<bool>();
}

const json& section(const json& j, const std::string& key) {
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    if (!j[key].is_object()) throw ParseError(key, "expected an object");
    return j[key];
}

Scenario from_json(const json& j) {
    if (!j.is_object()) throw ParseError("config", "expected an object");
    reject_unknown(j, "",
                   {"f_clk_mhz", "bus_width_bits", "t_mvm_ns", "crossbar_side", "cfg_cycles_per_layer",
                    "push_cycles", "dw", "cores", "run", "notes"});
    Scenario s;
    ClusterConfig& c = s.cluster;
    c.f_clk_hz = get_number(j, "f_clk_mhz", "f_clk_mhz", c.f_clk_hz / 1e6) * 1e6;
    c.bus_width_bits = get_int(j, "bus_width_bits", "bus_width_bits", c.bus_width_bits);
    c.t_mvm_s = get_number(j, "t_mvm_ns", "t_mvm_ns", c.t_mvm_s * 1e9) * 1e-9;
    c.crossbar_side = get_int(j, "crossbar_side", "crossbar_side", c.crossbar_side);
    c.cfg_cycles_per_layer =
        get_int(j, "cfg_cycles_per_layer", "cfg_cycles_per_layer", c.cfg_cycles_per_layer);
    c.push_cycles = get_int(j, "push_cycles", "push_cycles", c.push_cycles);

    const json& dw = section(j, "dw");
    reject_unknown(dw, "dw",
                   {"bytes_per_cycle", "channels_per_block", "macs_per_cycle_peak", "inner_loop_cycles",
                    "weight_preload_cycles", "window_preload_cycles", "edge_clear_cycles",
                    "run_strided_layers"});
    DwConfig& d = c.dw;
    d.bytes_per_cycle = get_number(dw, "bytes_per_cycle", "dw.bytes_per_cycle", d.bytes_per_cycle);
    d.channels_per_block = get_int(dw, "channels_per_block", "dw.channels_per_block", d.channels_per_block);
    d.macs_per_cycle_peak =
        get_int(dw, "macs_per_cycle_peak", "dw.macs_per_cycle_peak", d.macs_per_cycle_peak);
    d.inner_loop_cycles = get_int(dw, "inner_loop_cycles", "dw.inner_loop_cycles", d.inner_loop_cycles);
    d.weight_preload_cycles =
        get_int(dw, "weight_preload_cycles", "dw.weight_preload_cycles", d.weight_preload_cycles);
    d.window_preload_cycles =
        get_int(dw, "window_preload_cycles", "dw.window_preload_cycles", d.window_preload_cycles);
    d.edge_clear_cycles = get_int(dw, "edge_clear_cycles", "dw.edge_clear_cycles", d.edge_clear_cycles);
    d.run_strided_layers = get_bool(dw, "run_strided_layers", "dw.run_strided_layers", d.run_strided_layers);

    const json& cores = section(j, "cores");
    reject_unknown(cores, "cores",
                   {"n_cores", "pw_macs_per_cycle", "dw_macs_per_cycle", "residual_elems_per_cycle",
                    "marshal_cycles_per_elem"});
    CoreConfig& k = c.cores;
    k.n_cores = get_int(cores, "n_cores", "cores.n_cores", k.n_cores);
    k.pw_macs_per_cycle = get_number(cores, "pw_macs_per_cycle", "cores.pw_macs_per_cycle", k.pw_macs_per_cycle);
    k.dw_macs_per_cycle = get_number(cores, "dw_macs_per_cycle", "cores.dw_macs_per_cycle", k.dw_macs_per_cycle);
    k.residual_elems_per_cycle = get_number(cores, "residual_elems_per_cycle",
                                            "cores.residual_elems_per_cycle", k.residual_elems_per_cycle);
    k.marshal_cycles_per_elem = get_number(cores, "marshal_cycles_per_elem",
                                           "cores.marshal_cycles_per_elem", k.marshal_cycles_per_elem);

    const json& run = section(j, "run");
    reject_unknown(run, "run",
                   {"model", "include_first_conv", "include_classifier", "n_ima_available", "roofline_jobs"});
    if (run.contains("model")) {
        if (!run["model"].is_string()) throw ParseError("run.model", "expected a string");
        const auto m = run["model"].get<std::string>();
        if (m == "pipelined")
            s.schedule.model = ExecModel::Pipelined;
        else if (m == "sequential")
            s.schedule.model = ExecModel::Sequential;
        else
            throw ConfigError("run.model must be 'pipelined' or 'sequential'");
    }
    s.schedule.pack.include_first_conv =
        get_bool(run, "include_first_conv", "run.include_first_conv", s.schedule.pack.include_first_conv);
    s.schedule.pack.include_classifier =
        get_bool(run, "include_classifier", "run.include_classifier", s.schedule.pack.include_classifier);
    s.n_ima_available = get_int(run, "n_ima_available", "run.n_ima_available", s.n_ima_available);
    s.roofline_jobs = get_int(run, "roofline_jobs", "run.roofline_jobs", s.roofline_jobs);
    if (s.n_ima_available < 0) throw ConfigError("run.n_ima_available must be >= 0");
    if (s.roofline_jobs < 1) throw ConfigError("run.roofline_jobs must be >= 1");

    validate_config(c);
    return s;
}

json to_json(const Scenario& s) {
    const ClusterConfig& c = s.cluster;
    return json{
        {"f_clk_mhz", c.f_clk_hz / 1e6},
        {"bus_width_bits", c.bus_width_bits},
        {"t_mvm_ns", c.t_mvm_s * 1e9},
        {"crossbar_side", c.crossbar_side},
        {"cfg_cycles_per_layer", c.cfg_cycles_per_layer},
        {"push_cycles", c.push_cycles},
        {"dw",
         {{"bytes_per_cycle", c.dw.bytes_per_cycle},
          {"channels_per_block", c.dw.channels_per_block},
          {"macs_per_cycle_peak", c.dw.macs_per_cycle_peak},
          {"inner_loop_cycles", c.dw.inner_loop_cycles},
          {"weight_preload_cycles", c.dw.weight_preload_cycles},
          {"window_preload_cycles", c.dw.window_preload_cycles},
          {"edge_clear_cycles", c.dw.edge_clear_cycles},
          {"run_strided_layers", c.dw.run_strided_layers}}},
        {"cores",
         {{"n_cores", c.cores.n_cores},
          {"pw_macs_per_cycle", c.cores.pw_macs_per_cycle},
          {"dw_macs_per_cycle", c.cores.dw_macs_per_cycle},
          {"residual_elems_per_cycle", c.cores.residual_elems_per_cycle},
          {"marshal_cycles_per_elem", c.cores.marshal_cycles_per_elem}}},
        {"run",
         {{"model", std::string(to_string(s.schedule.model))},
          {"include_first_conv", s.schedule.pack.include_first_conv},
          {"include_classifier", s.schedule.pack.include_classifier},
          {"n_ima_available", s.n_ima_available},
          {"roofline_jobs", s.roofline_jobs}}},
    };
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("config", e.what());
    }
    return from_json(j);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) { return to_json(s).dump(2); }

Scenario with_override(const Scenario& s, std::string_view key, double value) {
    json j = to_json(s);
    std::string pointer = "/" + std::string(key);
    for (auto& ch : pointer)
        if (ch == '.') ch = '/';
    const json::json_pointer ptr(pointer);
    if (!j.contains(ptr) || !j[ptr].is_number())
        throw ConfigError("cannot sweep '" + std::string(key) + "': not a numeric config key");
    if (j[ptr].is_number_integer()) {
        if (value != std::floor(value)) throw ConfigError(std::string(key) + " must be an integer");
        j[ptr] = static_cast<std::int64_t>(value);
    } else {
        j[ptr] = value;
    }
    return from_json(j);
}

}  // namespace imcsim
