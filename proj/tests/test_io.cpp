#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "betactl/cli.hpp"
#include "betactl/config.hpp"
#include "betactl/io.hpp"

#include <json.hpp>

using namespace betactl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("betactl_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

SimResult short_run(int id, LoopMode mode) {
    Scenario sc = scenario_by_id(id);
    sc.duration = 0.3;
    return run_scenario(sc, mode, SimConfig{});
}

}  // namespace

TEST_CASE("empty config reproduces the defaults") {
    const RunConfig c = parse_config_text("");
    CHECK(c.sim.control.alpha == 50.0);
    CHECK(c.sim.control.K == 5.0);
    CHECK(c.sim.h == 1e-4);
    CHECK(c.sim.estimator.tau_f == 0.8);
    CHECK(c.sim.control.t_on == 0.2);
    CHECK(c.mode == LoopMode::open);
    CHECK(c.scenario_id == 1);
}

TEST_CASE("config values overlay the defaults") {
    const RunConfig c = parse_config_text(R"(
# comment
mode = "closed"
scenario.seed = 7
[control]
K = 2.5          # trailing comment
estimator = "windowed"
[plant]
b2 = 100
[output]
svg = false
)");
    CHECK(c.mode == LoopMode::closed);
    CHECK(c.sim.control.K == 2.5);
    CHECK(c.sim.estimator.variant == EstimatorVariant::windowed);
    CHECK(c.sim.plant.b2 == 100.0);
    CHECK(c.seed == 7);
    CHECK_FALSE(c.write_svg);
    CHECK(c.scenario(3).seed == 7);
}

TEST_CASE("config errors name the problem") {
    CHECK_THROWS_WITH(parse_config_text("control.K = -1"), doctest::Contains("K must be positive"));
    CHECK_THROWS_WITH(parse_config_text("scnario.id = 1"), doctest::Contains("scnario.id"));
    CHECK_THROWS_WITH(parse_config_text("[control]\nalpah = 3"), doctest::Contains("control.alpah"));
    CHECK_THROWS_WITH(parse_config_text("\n\nmode = \"sideways\""), doctest::Contains("mode"));
    CHECK_THROWS_WITH(parse_config_text("control.K = 1\ncontrol.K = 2"), doctest::Contains("control.K"));
    CHECK_THROWS_WITH(parse_config_text("[control\nK = 1"), doctest::Contains("line 1"));
    CHECK_THROWS(parse_config_text("control.K = abc"));
    CHECK_THROWS(parse_config_text("dsp.f_lo = 40\ndsp.f_hi = 30"));
    CHECK_THROWS_AS(parse_config("/nonexistent/betactl.toml"), ConfigError);
}

TEST_CASE("config file round trip") {
    const auto dir = scratch("config");
    std::ofstream(dir / "run.toml") << "scenario.id = 2\n[output]\ndir = \"elsewhere\"\n";
    const RunConfig c = parse_config(dir / "run.toml");
    CHECK(c.scenario_id == 2);
    CHECK(c.out_dir == "elsewhere");
}

TEST_CASE("CSV round trip is bit exact") {
    const SimResult r = short_run(3, LoopMode::closed);
    std::stringstream ss;
    write_csv(r, ss);
    const std::string text = ss.str();
    CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    const SimResult back = read_csv(ss);
    CHECK(back.t == r.t);
    CHECK(back.x1 == r.x1);
    CHECK(back.x2 == r.x2);
    CHECK(back.y_beta == r.y_beta);
    CHECK(back.y_cc == r.y_cc);
    CHECK(back.u1 == r.u1);
    CHECK(back.f_est == r.f_est);
    CHECK(back.y_star == r.y_star);
    CHECK(back.h == doctest::Approx(r.h).epsilon(1e-12));
}

TEST_CASE("malformed CSV") {
    std::istringstream missing("t,x1,x2,y_beta,u1,F_est,y_star\n0,1,2,3,4,5,6\n");
    CHECK_THROWS_WITH(read_csv(missing), doctest::Contains("y_cc"));
    std::istringstream bad(std::string(kCsvHeader) + "\n0,1,2,3,4,5,6,7\n0.0001,1,2,x,4,5,6,7\n");
    CHECK_THROWS_WITH(read_csv(bad), doctest::Contains("line 3"));
    std::istringstream short_row(std::string(kCsvHeader) + "\n0,1,2\n");
    CHECK_THROWS_WITH(read_csv(short_row), doctest::Contains("line 2"));
}

TEST_CASE("SVG figure structure") {
    const std::string svg = render_svg(short_run(1, LoopMode::open), short_run(1, LoopMode::closed));
    CHECK(svg.rfind("<svg", 0) == 0);
    for (char c : std::string("abcdef")) {
        CHECK(svg.find("id=\"panel-" + std::string(1, c) + "\"") != std::string::npos);
    }
    const auto panel_f = svg.find("id=\"panel-f\"");
    const auto line = svg.find("class=\"setpoint\"", panel_f);
    REQUIRE(line != std::string::npos);
    const auto end = svg.find("/>", line);
    const std::string tag = svg.substr(line, end - line);
    CHECK(tag.find("data-value=\"0.1\"") != std::string::npos);
    CHECK(tag.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("metrics JSON") {
    const SimResult r = run_scenario(scenario_by_id(1), LoopMode::open, SimConfig{});
    const auto rep = spectrum_report(r, "x1", {0.7, 1.5});
    const std::string json = metrics_json({rep});
    CHECK(json.find("\"reports\"") != std::string::npos);
    CHECK(json.find("\"beta_power\"") != std::string::npos);
    CHECK(json.find("\"tone50_power\"") != std::string::npos);
    const auto parsed = nlohmann::json::parse(json);
    CHECK(parsed["reports"][0]["series"] == "x1");
    CHECK(parsed["reports"][0]["suppression_ratio"].is_null());
}

TEST_CASE("run command writes CSV, metrics and figure") {
    const auto dir = scratch("run");
    RunConfig cfg;
    cfg.duration = 1.5;
    std::ostringstream out, err;
    CHECK(cmd_run(cfg, dir, out, err) == 0);
    const std::string csv = slurp(dir / "s1_open.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 15002);
    const SimResult r = read_csv(dir / "s1_open.csv");
    CHECK(r.size() == 15001);
    for (double u : r.u1) REQUIRE(u == 0.0);
    CHECK(fs::exists(dir / "s1_open_metrics.json"));
    CHECK_FALSE(fs::exists(dir / "s1.svg"));

    cfg.mode = LoopMode::closed;
    CHECK(cmd_run(cfg, dir, out, err) == 0);
    CHECK(fs::exists(dir / "s1.svg"));
    CHECK(slurp(dir / "s1_closed_metrics.json").find("suppression_ratio") != std::string::npos);
}

TEST_CASE("run command is byte-for-byte repeatable") {
    const auto a = scratch("repeat_a"), b = scratch("repeat_b");
    RunConfig cfg;
    cfg.scenario_id = 3;
    cfg.mode = LoopMode::closed;
    cfg.seed = 42;
    cfg.write_svg = false;
    std::ostringstream out, err;
    REQUIRE(cmd_run(cfg, a, out, err) == 0);
    REQUIRE(cmd_run(cfg, b, out, err) == 0);
    CHECK(slurp(a / "s3_closed.csv") == slurp(b / "s3_closed.csv"));
    CHECK(slurp(a / "s3_closed_metrics.json") == slurp(b / "s3_closed_metrics.json"));
}

TEST_CASE("plot command") {
    const auto dir = scratch("plot");
    write_csv(short_run(2, LoopMode::open), dir / "s2_open.csv");
    write_csv(short_run(2, LoopMode::closed), dir / "s2_closed.csv");
    std::ostringstream out, err;
    CHECK(cmd_plot(dir, out, err) == 0);
    CHECK(fs::exists(dir / "s2.svg"));
    const auto empty = scratch("plot_empty");
    CHECK(cmd_plot(empty, out, err) != 0);
    CHECK(cmd_plot(dir / "missing", out, err) != 0);
}

TEST_CASE("output directory precedence") {
    RunConfig cfg;
    cfg.out_dir = "from_config";
    ::unsetenv("BETACTL_OUT");
    CHECK(resolve_out_dir(cfg, std::nullopt) == "from_config");
    ::setenv("BETACTL_OUT", "from_env", 1);
    CHECK(resolve_out_dir(cfg, std::nullopt) == "from_env");
    CHECK(resolve_out_dir(cfg, std::string("from_flag")) == "from_flag");
    ::unsetenv("BETACTL_OUT");
}

TEST_CASE("run command reports failures") {
    RunConfig cfg;
    cfg.mode = LoopMode::closed;
    cfg.sim.control.K = -1.0;
    std::ostringstream out, err;
    CHECK(cmd_run(cfg, scratch("fail"), out, err) != 0);
    CHECK(err.str().find("K must be positive") != std::string::npos);
}
