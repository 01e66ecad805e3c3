//
// SPDX-License-Identifier: Apache-2.0
//
// imcsim command line: pack, roofline, bottleneck, e2e.
//

#include "imcsim/config.hpp"
#include "imcsim/energy.hpp"
#include "imcsim/errors.hpp"
#include "imcsim/mapping.hpp"
#include "imcsim/nnspec.hpp"
#include "imcsim/report.hpp"
#include "imcsim/schedule.hpp"
#include "imcsim/tilepack.hpp"
#include "imcsim/timing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace imcsim;

namespace {

struct Common {
    std::string network;
    std::string config;
    std::string profile;
    std::string out = "results";
    std::vector<std::string> sweeps;
};

struct Axis {
    std::string key;
    std::vector<double> values;
};

struct Variant {
    Scenario scenario;
    std::string label;  // "key=value;key=value", empty without sweeps
};

Axis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
        throw ConfigError("--sweep expects AXIS=v1,v2,...; got '" + text + "'");
    Axis axis{text.substr(0, eq), {}};
    std::string rest = text.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        const auto comma = rest.find(',', start);
        const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size())
            throw ConfigError("--sweep " + axis.key + ": '" + item + "' is not a number");
        axis.values.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return axis;
}

std::vector<Variant> expand(const Scenario& base, const std::vector<Axis>& axes) {
    std::vector<Variant> out{{base, ""}};
    for (const auto& axis : axes) {
        std::vector<Variant> next;
        for (const auto& v : out) {
            for (double x : axis.values) {
                Variant n{with_override(v.scenario, axis.key, x), v.label};
                if (!n.label.empty()) n.label += ';';
                n.label += axis.key + "=" + format_number(x);
                next.push_back(std::move(n));
            }
        }
        out = std::move(next);
    }
    return out;
}

Scenario base_scenario(const Common& c) {
    return c.config.empty() ? Scenario{} : load_scenario(c.config);
}

std::vector<Axis> parse_axes(const std::vector<std::string>& sweeps) {
    std::vector<Axis> axes;
    for (const auto& s : sweeps) axes.push_back(parse_axis(s));
    return axes;
}

std::optional<PowerProfile> maybe_profile(const Common& c) {
    if (c.profile.empty()) return std::nullopt;
    return load_profile(c.profile);
}

// Columns every result row carries so that it can be traced to its config.
const std::vector<std::string> kConfigColumns = {"config", "f_clk_mhz", "bus_width_bits", "t_mvm_ns",
                                                 "cfg_cycles_per_layer", "push_cycles", "model"};

std::vector<std::string> config_cells(const Variant& v) {
    const ClusterConfig& c = v.scenario.cluster;
    return {v.label,
            format_number(c.f_clk_hz / 1e6),
            std::to_string(c.bus_width_bits),
            format_number(c.t_mvm_s * 1e9),
            std::to_string(c.cfg_cycles_per_layer),
            std::to_string(c.push_cycles),
            std::string(to_string(v.scenario.schedule.model))};
}

std::vector<std::string> with_config(const std::vector<std::string>& cols) {
    std::vector<std::string> h = kConfigColumns;
    h.insert(h.end(), cols.begin(), cols.end());
    return h;
}

std::vector<std::string> row(const Variant& v, std::vector<std::string> cells) {
    auto r = config_cells(v);
    r.insert(r.end(), cells.begin(), cells.end());
    return r;
}

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
    return fs::path(dir);
}

void emit(const fs::path& dir, const std::string& name, const std::string& content) {
    write_file_atomic(dir / name, content);
    std::cout << "wrote " << (dir / name).string() << "\n";
}

NetworkSpec need_network(const Common& c) {
    if (c.network.empty()) throw ConfigError("--network is required");
    return load_network(c.network);
}

std::string str(std::int64_t v) { return std::to_string(v); }
std::string num(double v) { return format_number(v); }

// ---------------------------------------------------------------------------

void cmd_pack(const Common& c, std::optional<std::int64_t> n_ima, bool classifier, bool no_first_conv) {
    const NetworkSpec net = need_network(c);
    const auto variants = expand(base_scenario(c), parse_axes(c.sweeps));
    const fs::path dir = prepare_out(c.out);

    CsvTable bins(with_config({"network", "bin", "utilization", "n_tiles", "tiles"}));
    CsvTable tiles(with_config({"network", "tile", "bin", "x", "y", "rows", "cols"}));
    json summary = json::array();
    for (const auto& v : variants) {
        PackOptions opt = v.scenario.schedule.pack;
        if (classifier) opt.include_classifier = true;
        if (no_first_conv) opt.include_first_conv = false;
        const std::int64_t available = n_ima.value_or(v.scenario.n_ima_available);
        const Packing p = pack_network(net, v.scenario.cluster.crossbar_side, available, opt);

        std::int64_t full = 0;
        for (const auto& b : p.bins) {
            std::string names;
            for (const auto& pl : b.placements) {
                if (!names.empty()) names += ' ';
                names += pl.tile.name;
                tiles.add_row(row(v, {net.name, pl.tile.name, str(b.index), str(pl.x), str(pl.y),
                                      str(pl.tile.h), str(pl.tile.w)}));
            }
            if (b.used_area() == b.side * b.side) ++full;
            bins.add_row(row(v, {net.name, str(b.index), num(b.utilization()),
                                 str(static_cast<std::int64_t>(b.placements.size())), names}));
        }
        std::int64_t n_tiles = 0;
        for (const auto& b : p.bins) n_tiles += static_cast<std::int64_t>(b.placements.size());
        summary.push_back({{"config", v.label},
                           {"network", net.name},
                           {"side", p.side},
                           {"n_tiles", n_tiles},
                           {"n_ima_required", p.n_ima_required()},
                           {"n_ima_available", available},
                           {"shortfall", p.shortfall()},
                           {"fully_utilized_bins", full},
                           {"tile_area", p.total_tile_area()},
                           {"per_bin_utilization", p.per_bin_utilization()}});
        std::cout << net.name << (v.label.empty() ? "" : " [" + v.label + "]") << ": " << n_tiles
                  << " tiles in " << p.n_ima_required() << " IMAs (" << full << " fully utilized)";
        if (p.shortfall() > 0) std::cout << ", " << p.shortfall() << " more than the " << available << " available";
        std::cout << "\n";
    }
    emit(dir, "pack_bins.csv", bins.str());
    emit(dir, "pack_tiles.csv", tiles.str());
    emit(dir, "pack_summary.json", summary.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

void cmd_roofline(const Common& c, std::optional<std::int64_t> jobs) {
    auto axes = parse_axes(c.sweeps);
    const auto has = [&](const std::string& k) {
        for (const auto& a : axes)
            if (a.key == k) return true;
        return false;
    };
    if (!has("f_clk_mhz")) axes.insert(axes.begin(), {"f_clk_mhz", {250, 500}});
    if (!has("bus_width_bits")) axes.insert(axes.begin() + 1, {"bus_width_bits", {32, 64, 128, 256, 512}});
    const auto variants = expand(base_scenario(c), axes);
    const fs::path dir = prepare_out(c.out);

    CsvTable t(with_config({"exec_model", "utilization", "rows", "intensity", "roof_gops", "bw_bound_gops",
                            "attainable_gops", "achieved_gops", "stream_fraction", "memory_bound"}));
    for (const auto& v : variants) {
        const ClusterConfig& cfg = v.scenario.cluster;
        const std::int64_t n = jobs.value_or(v.scenario.roofline_jobs);
        for (int step = 1; step <= 20; ++step) {
            const double u = step * 0.05;
            const JobPlan plan = square_layer_plan(u, n, cfg.crossbar_side);
            RooflinePoint p = roofline_at(plan_intensity(plan), cfg);
            for (ExecModel m : {ExecModel::Sequential, ExecModel::Pipelined}) {
                const LayerTime lt = ima_layer_time(plan, cfg, m);
                t.add_row(row(v, {std::string(to_string(m)), num(u), str(plan.rows_used), num(p.intensity),
                                  num(p.roof / 1e9), num(p.bw_bound / 1e9), num(p.attainable / 1e9),
                                  num(lt.gops), num(sequential_stream_fraction(plan, cfg)),
                                  p.memory_bound ? "true" : "false"}));
            }
        }
        const JobPlan full = square_layer_plan(1.0, n, cfg.crossbar_side);
        const RooflinePoint p = roofline_at(plan_intensity(full), cfg);
        std::cout << num(cfg.f_clk_hz / 1e6) << " MHz, " << cfg.bus_width_bits << "-bit: full crossbar "
                  << (p.memory_bound ? "memory" : "compute") << "-bound, pipelined "
                  << num(ima_layer_time(full, cfg, ExecModel::Pipelined).gops) << " GOPS\n";
    }
    emit(dir, "roofline.csv", t.str());
}

// ---------------------------------------------------------------------------

struct StrategyRun {
    Strategy strategy;
    Timeline timeline;
    std::optional<EnergyReport> energy;
};

void cmd_bottleneck(const Common& c, const std::vector<std::string>& strategy_names) {
    const NetworkSpec net = need_network(c);
    const auto variants = expand(base_scenario(c), parse_axes(c.sweeps));
    const auto profile = maybe_profile(c);
    const fs::path dir = prepare_out(c.out);

    std::vector<Strategy> strategies;
    for (const auto& s : strategy_names) strategies.push_back(parse_strategy(s));

    CsvTable layers(with_config({"network", "strategy", "layer", "kind", "unit", "macs", "cycles", "seconds",
                                 "marshal_cycles", "energy_j"}));
    CsvTable summary(with_config({"network", "strategy", "cycles", "seconds", "speedup_vs_cores", "energy_j",
                                  "energy_vs_cores", "ima_seconds", "dw_seconds", "cores_seconds",
                                  "crossbar_cells", "device_increase"}));
    for (const auto& v : variants) {
        std::vector<StrategyRun> runs;
        for (const auto& s : strategies) {
            StrategyRun r{s, bottleneck_schedule(net, s, v.scenario.cluster), std::nullopt};
            if (profile) r.energy = timeline_energy(r.timeline, *profile);
            runs.push_back(std::move(r));
        }
        PackOptions bottleneck_pack;
        bottleneck_pack.include_classifier = true;
        const StrategyRun* ref = nullptr;
        for (const auto& r : runs)
            if (r.strategy.kind == StrategyKind::Cores) ref = &r;

        for (const auto& r : runs) {
            for (std::size_t i = 0; i < r.timeline.layers.size(); ++i) {
                const auto& l = r.timeline.layers[i];
                layers.add_row(row(v, {net.name, r.strategy.label(), l.layer, std::string(to_string(l.kind)),
                                       std::string(to_string(l.unit)), str(l.macs), str(l.cycles), num(l.seconds),
                                       str(l.marshal_cycles), r.energy ? num(r.energy->layers[i].joules) : ""}));
            }
            const double secs = r.timeline.total_seconds();
            const std::int64_t c_job = r.strategy.kind == StrategyKind::ImaAll ? r.strategy.c_job : 0;
            std::string cells;
            std::string increase;
            if (c_job) {
                const DeviceCount dc = network_device_count(net, c_job);
                cells = str(dc.cells);
                increase = num(dc.increase());
            } else if (r.strategy.kind != StrategyKind::Cores) {
                std::int64_t n = 0;
                for (const auto& m : crossbar_matrices(net, bottleneck_pack)) n += m.dims.cells();
                cells = str(n);
                increase = num(0.0);
            }
            summary.add_row(row(
                v, {net.name, r.strategy.label(), str(r.timeline.total_cycles()), num(secs),
                    ref ? num(ref->timeline.total_seconds() / secs) : "", r.energy ? num(r.energy->total_joules) : "",
                    ref && r.energy ? num(r.energy->total_joules / ref->energy->total_joules) : "",
                    num(r.timeline.seconds_on(Unit::Ima)), num(r.timeline.seconds_on(Unit::Dw)),
                    num(r.timeline.seconds_on(Unit::Cores)), cells, increase}));
            std::cout << r.strategy.label() << (v.label.empty() ? "" : " [" + v.label + "]") << ": "
                      << r.timeline.total_cycles() << " cycles";
            if (ref) std::cout << ", " << num(ref->timeline.total_seconds() / secs) << "x vs cores";
            if (r.energy) std::cout << ", " << num(r.energy->total_joules * 1e6) << " uJ";
            std::cout << "\n";
        }
    }
    emit(dir, "bottleneck_layers.csv", layers.str());
    emit(dir, "bottleneck_summary.csv", summary.str());
}

// ---------------------------------------------------------------------------

void cmd_e2e(const Common& c, const std::string& strategy_name) {
    const NetworkSpec net = need_network(c);
    const auto variants = expand(base_scenario(c), parse_axes(c.sweeps));
    const auto profile = maybe_profile(c);
    const Strategy strategy = parse_strategy(strategy_name);
    const fs::path dir = prepare_out(c.out);

    CsvTable layers(with_config({"network", "strategy", "layer", "kind", "unit", "macs", "cycles", "seconds",
                                 "n_tiles", "accumulate_cycles", "marshal_cycles", "energy_j", "gmacs_per_s_per_w"}));
    json summary = json::array();
    for (const auto& v : variants) {
        const Timeline tl = schedule_network(net, strategy, v.scenario.cluster, v.scenario.schedule);
        std::optional<EnergyReport> energy;
        if (profile) energy = timeline_energy(tl, *profile);
        for (std::size_t i = 0; i < tl.layers.size(); ++i) {
            const auto& l = tl.layers[i];
            std::string eff;
            if (energy) {
                const double j = energy->layers[i].joules;
                eff = j > 0 ? num(static_cast<double>(l.macs) / j / 1e9) : "inf";
            }
            layers.add_row(row(v, {net.name, tl.strategy, l.layer, std::string(to_string(l.kind)),
                                   std::string(to_string(l.unit)), str(l.macs), str(l.cycles), num(l.seconds),
                                   str(l.n_tiles), str(l.accumulate_cycles), str(l.marshal_cycles),
                                   energy ? num(energy->layers[i].joules) : "", eff}));
        }

        const Packing p = pack_network(net, v.scenario.cluster.crossbar_side, v.scenario.n_ima_available,
                                       v.scenario.schedule.pack);
        json s = {{"config", v.label},
                  {"network", net.name},
                  {"strategy", tl.strategy},
                  {"cycles", tl.total_cycles()},
                  {"latency_s", tl.total_seconds()},
                  {"macs", tl.total_macs()},
                  {"ops", tl.total_ops()},
                  {"seconds_by_unit",
                   {{"ima", tl.seconds_on(Unit::Ima)},
                    {"dw", tl.seconds_on(Unit::Dw)},
                    {"cores", tl.seconds_on(Unit::Cores)}}},
                  {"n_ima", p.n_ima_required()},
                  {"cluster", json::parse(serialize_scenario(v.scenario))}};
        std::cout << net.name << " " << tl.strategy << (v.label.empty() ? "" : " [" + v.label + "]") << ": "
                  << num(tl.total_seconds() * 1e3) << " ms";
        if (energy && profile) {
            const double area = crossbar_area_mm2(p.n_ima_required() * p.side * p.side, *profile, p.side);
            const Efficiency e =
                efficiency_metrics(static_cast<double>(tl.total_ops()), tl.total_seconds(), energy->total_joules, area);
            s["profile"] = profile->label;
            s["energy_j"] = energy->total_joules;
            s["energy_by_block"] = energy->per_block;
            s["average_power_w"] = e.average_power_w;
            s["gops"] = e.gops;
            s["tops_per_w"] = std::isinf(e.tops_per_w) ? json("inf") : json(e.tops_per_w);
            s["crossbar_area_mm2"] = area;
            s["gops_per_mm2"] = e.gops_per_mm2;
            std::cout << ", " << num(energy->total_joules * 1e6) << " uJ, " << num(e.gops) << " GOPS";
        }
        std::cout << "\n";
        summary.push_back(std::move(s));
    }
    emit(dir, "e2e_layers.csv", layers.str());
    emit(dir, "e2e_summary.json", summary.dump(2) + "\n");
}

void add_common(CLI::App* cmd, Common& c, bool needs_network, bool energy) {
    if (needs_network) cmd->add_option("--network", c.network, "Network description (JSON)")->required();
    cmd->add_option("--config", c.config, "Cluster and run configuration (JSON)");
    if (energy) cmd->add_option("--profile", c.profile, "Power profile (JSON)");
    cmd->add_option("--sweep", c.sweeps, "Sweep a numeric config key, e.g. bus_width_bits=64,128");
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Performance and energy model of a heterogeneous in-memory computing cluster"};
    app.require_subcommand(1);

    Common common;
    auto* pack = app.add_subcommand("pack", "Tile and pack the crossbar layers of a network onto IMAs");
    add_common(pack, common, true, false);
    std::optional<std::int64_t> n_ima;
    bool classifier = false;
    bool no_first_conv = false;
    pack->add_option("--n-ima", n_ima, "Number of available IMAs");
    pack->add_flag("--include-classifier", classifier, "Also place the classifier on the crossbars");
    pack->add_flag("--exclude-first-conv", no_first_conv, "Run the first convolution in software");

    auto* roof = app.add_subcommand("roofline", "Roofline and measured throughput of the IMA");
    add_common(roof, common, false, false);
    std::optional<std::int64_t> jobs;
    roof->add_option("--jobs", jobs, "Jobs per synthetic layer");

    auto* bneck = app.add_subcommand("bottleneck", "Compare mapping strategies on a bottleneck block");
    add_common(bneck, common, true, true);
    std::vector<std::string> strategies = {"cores", "ima_cjob8", "ima_cjob16", "hybrid", "ima_dw"};
    bneck->add_option("--strategy", strategies, "Strategies to run")->capture_default_str();

    auto* e2e = app.add_subcommand("e2e", "End-to-end latency and energy of a network");
    add_common(e2e, common, true, true);
    std::string strategy = "ima_dw";
    e2e->add_option("--strategy", strategy, "Mapping strategy")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (pack->parsed()) cmd_pack(common, n_ima, classifier, no_first_conv);
        if (roof->parsed()) cmd_roofline(common, jobs);
        if (bneck->parsed()) cmd_bottleneck(common, strategies);
        if (e2e->parsed()) cmd_e2e(common, strategy);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
