#include <doctest.h>

#include "imcsim/config.hpp"
#include "imcsim/errors.hpp"
#include "imcsim/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace imcsim;

TEST_CASE("shipped config loads") {
    const Scenario s = load_scenario(IMCSIM_CONFIG_DIR "/cluster.json");
    CHECK(s.cluster.f_clk_hz == doctest::Approx(500e6));
    CHECK(s.cluster.bus_width_bits == 128);
    CHECK(s.cluster.t_mvm_s == doctest::Approx(130e-9));
    CHECK(s.cluster.cfg_cycles_per_layer == 173);
    CHECK(s.cluster.dw.edge_clear_cycles == 10);
    CHECK(s.cluster.dw.run_strided_layers);
    CHECK(s.n_ima_available == 34);
    CHECK(s.schedule.model == ExecModel::Pipelined);
    CHECK_FALSE(s.schedule.pack.include_classifier);
}

TEST_CASE("defaults when keys are omitted") {
    const Scenario s = parse_scenario("{}");
    CHECK(s.cluster.dw.edge_clear_cycles == 1);
    CHECK(s.cluster.cores.dw_macs_per_cycle == doctest::Approx(1.14));
    CHECK(s.roofline_jobs == 1000);
}

TEST_CASE("scenario round trip") {
    const Scenario s = load_scenario(IMCSIM_CONFIG_DIR "/cluster.json");
    const Scenario again = parse_scenario(serialize_scenario(s));
    CHECK(serialize_scenario(again) == serialize_scenario(s));
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_scenario(R"({"bus_width":128})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"dw":{"edge":1}})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"bus_width_bits":"wide"})"), ParseError);
    CHECK_THROWS_AS(parse_scenario(R"({"bus_width_bits":100})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"push_cycles":1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"run":{"model":"parallel"}})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("{"), ParseError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/cluster.json"), IoError);
}

TEST_CASE("overrides") {
    const Scenario s = parse_scenario("{}");
    CHECK(with_override(s, "bus_width_bits", 64).cluster.bus_width_bits == 64);
    CHECK(with_override(s, "f_clk_mhz", 250).cluster.f_clk_hz == doctest::Approx(250e6));
    CHECK(with_override(s, "dw.edge_clear_cycles", 7).cluster.dw.edge_clear_cycles == 7);
    CHECK_THROWS_AS(with_override(s, "dw.edge_clear_cycles", 1.5), ConfigError);
    CHECK_THROWS_AS(with_override(s, "nope", 1), ConfigError);
    CHECK_THROWS_AS(with_override(s, "run.model", 1), ConfigError);
    CHECK_THROWS_AS(with_override(s, "bus_width_bits", 20), ConfigError);
}

TEST_CASE("csv table and atomic write") {
    CsvTable t({"a", "b"});
    t.add_row({"1", "x,y"});
    t.add_row({"2", "say \"hi\""});
    CHECK(t.str() == "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    CHECK_THROWS_AS(t.add_row({"only one"}), DimensionError);

    const auto dir = std::filesystem::temp_directory_path() / "imcsim_report_test";
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "t.csv", t.str());
    std::ifstream in(dir / "t.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == t.str());
    CHECK_FALSE(std::filesystem::exists(dir / "t.csv.tmp"));
    CHECK_THROWS_AS(write_file_atomic("/nonexistent/dir/t.csv", "x"), IoError);
    std::filesystem::remove_all(dir);

    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 0.0) == "inf");
}
