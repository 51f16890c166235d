#include "vide/commands.hpp"
#include "vide/errors.hpp"
#include "vide/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace vide;
namespace fs = std::filesystem;

namespace {

const fs::path scenario_dir = VIDE_SCENARIO_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("vide_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool config_error(const std::string& text) {
    try {
        (void)parse_scenario(text);
    } catch (const ConfigError&) {
        return true;
    }
    return false;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + VIDE_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* base = R"(
[scenario]
name = t
x0 = 1
[kernel]
id = power_decay:omega=1,alpha=0
[nonlinearity]
id = log_linear
[forcing]
id = zero
)";

}  // namespace

TEST_CASE("scenario round trip") {
    for (const auto& entry : fs::directory_iterator(scenario_dir)) {
        CAPTURE(entry.path().string());
        const Scenario s = load_scenario(entry.path());
        CHECK(parse_scenario(format_scenario(s)) == s);
    }
    Scenario s = load_scenario(scenario_dir / "rate_scale_sweep.ini");
    s.solver.rel_tol = 1e-7 / 3.0;
    s.x0 = 0.1;
    CHECK(parse_scenario(format_scenario(s)) == s);
}

TEST_CASE("scenario parsing") {
    const Scenario s = load_scenario(scenario_dir / "beta_sweep.ini");
    CHECK(s.name == "beta_sweep");
    CHECK(s.diagnostics == std::set<Diagnostic>{Diagnostic::BlowUpRate});
    REQUIRE(s.grid.size() == 1);
    CHECK(s.grid[0].key == "nonlinearity.beta");
    CHECK(s.grid[0].values == std::vector<double>{1.5, 2, 3});
    const Scenario defaults = parse_scenario(base);
    CHECK(defaults.rel_band == 0.05);
    CHECK(!defaults.solver.rel_tol);
}

TEST_CASE("scenario errors") {
    const std::string b = base;
    CHECK(config_error(b + "[scenario2]\n"));
    CHECK(config_error(b + "[solver]\nrel_tolerance = 1e-6\n"));
    CHECK(config_error(b + "[solver]\nrel_tol = fast\n"));
    CHECK(config_error(b + "[solver]\nrel_tol = -1\n"));
    CHECK(config_error("[scenario]\nx0 = 0\n"));
    CHECK(config_error("[scenario]\nx0 = -1\n"));
    CHECK(config_error("[scenario]\ncolour = red\n"));
    CHECK(config_error("[scenario]\ndiagnostics = speed\n"));
    CHECK(config_error("[kernel]\nid = gaussian\n"));
    CHECK(config_error("[kernel]\nid = power_decay:omega=1,beta=2\n"));
    CHECK(config_error("[nonlinearity]\nid = exp\n"));
    CHECK(config_error("[forcing]\nid = rate_scale:K=1\n"));  // default f is Osgood-finite
    CHECK(config_error("[scenario]\ndiagnostics = growth_rate\n[kernel]\nid = power_decay:omega=1,alpha=0\n"
                       "[nonlinearity]\nid = log_linear\n"));
    CHECK(config_error(b + "[sweep]\nspeed = 1, 2\n"));
    CHECK(config_error(b + "[sweep]\nbeta = 1, x\n"));
    CHECK_NOTHROW((void)parse_scenario("[scenario]\ndiagnostics = growth_rate\n[kernel]\nid = stretched_exp\n"
                                       "[nonlinearity]\nid = log_linear\n"));
    CHECK_THROWS_AS((void)load_scenario("/nonexistent/x.ini"), ConfigError);
}

TEST_CASE("grid keys and cells") {
    CHECK(canonical_grid_key("beta") == "nonlinearity.beta");
    CHECK(canonical_grid_key("omega") == "kernel.omega");
    CHECK(canonical_grid_key("K") == "forcing.K");
    CHECK(canonical_grid_key("kernel.alpha") == "kernel.alpha");
    CHECK_THROWS_AS((void)canonical_grid_key("solver.rel_tol"), ConfigError);
    CHECK_THROWS_AS((void)canonical_grid_key("kernel."), ConfigError);

    const Scenario s = parse_scenario(base);
    CHECK(with_parameter(s, "omega", 4).kernel_id == "power_decay:alpha=0,omega=4");
    CHECK(with_parameter(s, "kernel.alpha", 0.5).kernel_id == "power_decay:alpha=0.5,omega=1");

    const GridAxis a = parse_grid_axis("beta=1.5,2");
    CHECK(a.key == "beta");
    CHECK(a.values == std::vector<double>{1.5, 2});
    CHECK_THROWS_AS((void)parse_grid_axis("beta"), ConfigError);

    const Scenario p = load_scenario(scenario_dir / "blowup_power.ini");
    const auto cells = sweep_cells(p, {parse_grid_axis("beta=1.5,2,3"), parse_grid_axis("omega=1,4")});
    CHECK(cells.size() == 6);
    CHECK(sweep_cells(p, {}).empty());
}

TEST_CASE("classify output") {
    std::ostringstream out;
    CHECK(cmd_classify(load_scenario(scenario_dir / "blowup_power.ini"), out) == kExitOk);
    CHECK(out.str().find("FINITE") != std::string::npos);
    CHECK(out.str().find("criteria agree") != std::string::npos);

    std::ostringstream lin;
    CHECK(cmd_classify(load_scenario(scenario_dir / "cosh.ini"), lin) == kExitOk);
    CHECK(lin.str().find("INFINITE") != std::string::npos);
}

TEST_CASE("solve writes trajectory and plot files") {
    TempDir dir;
    std::ostringstream out;
    REQUIRE(cmd_solve(load_scenario(scenario_dir / "cosh.ini"), dir.path, out) == kExitOk);
    const std::string csv = read_file(dir.path / "cosh_trajectory.csv");
    CHECK(csv.rfind("t,x,dx,step\n", 0) == 0);
    CHECK(csv.find("# status=horizon") != std::string::npos);
    CHECK(fs::exists(dir.path / "cosh.gp"));
    CHECK(!fs::exists(dir.path / "cosh_crossings.csv"));

    // last data row: x(2) = cosh 2
    std::istringstream rows(csv);
    std::string line;
    std::string last;
    while (std::getline(rows, line)) {
        if (!line.empty() && line[0] != '#') last = line;
    }
    const double t = std::stod(last.substr(0, last.find(',')));
    const double x = std::stod(last.substr(last.find(',') + 1));
    CHECK(t == doctest::Approx(2.0));
    CHECK(std::abs(x - std::cosh(2.0)) <= 1e-4 * std::cosh(2.0));

    std::ostringstream blow;
    REQUIRE(cmd_solve(load_scenario(scenario_dir / "blowup_power.ini"), dir.path, blow) == kExitOk);
    CHECK(read_file(dir.path / "blowup_power_trajectory.csv").find("# status=blowup T_est=") != std::string::npos);
    const std::string crossings = read_file(dir.path / "blowup_power_crossings.csv");
    CHECK(crossings.rfind("index,level,t\n", 0) == 0);
    CHECK(read_file(dir.path / "blowup_power.gp").find("blowup_power_crossings.csv") != std::string::npos);
}

TEST_CASE("rates output and files") {
    TempDir dir;
    std::ostringstream out;
    CHECK(cmd_rates(load_scenario(scenario_dir / "blowup_power.ini"), dir.path, out) == kExitOk);
    CHECK(out.str().find("BlowUpRate limit") != std::string::npos);
    CHECK(out.str().find("CONSISTENT") != std::string::npos);
    const std::string csv = read_file(dir.path / "blowup_power_BlowUpRate.csv");
    CHECK(csv.rfind("t,value\n", 0) == 0);
    CHECK(csv.find("verdict=CONSISTENT") != std::string::npos);
}

TEST_CASE("default diagnostics") {
    Scenario s = parse_scenario(base);
    CHECK(applicable_diagnostics(s, OsgoodClass::Finite) == std::set<Diagnostic>{Diagnostic::BlowUpRate});
    CHECK(applicable_diagnostics(s, OsgoodClass::Infinite).empty());  // w = 1 is not integrable
    s.kernel_id = "stretched_exp:omega=1,gamma=1";
    s.forcing_id = "power_growth:alpha=1";
    CHECK(applicable_diagnostics(s, OsgoodClass::Infinite) ==
          std::set<Diagnostic>{Diagnostic::GrowthRate, Diagnostic::Perturbation});
    s.diagnostics = {Diagnostic::Perturbation};
    CHECK(applicable_diagnostics(s, OsgoodClass::Infinite) == std::set<Diagnostic>{Diagnostic::Perturbation});
}

TEST_CASE("sweep") {
    TempDir dir;
    SweepOptions o;
    o.out_dir = dir.path;
    o.threads = 2;
    o.emit_configs = true;
    std::ostringstream out;
    const Scenario s = load_scenario(scenario_dir / "beta_sweep.ini");
    CHECK(cmd_sweep(s, o, out) == kExitOk);
    const std::string csv = read_file(dir.path / "beta_sweep_sweep.csv");
    std::istringstream rows(csv);
    std::string header;
    std::getline(rows, header);
    CHECK(header == "cell,nonlinearity.beta,status,T_est,T_err,diagnostic,limit,err,target,verdict,perturbation,error");
    int n = 0;
    for (std::string line; std::getline(rows, line);) {
        ++n;
        CHECK(line.find("blowup") != std::string::npos);
        CHECK(line.find("CONSISTENT") != std::string::npos);
    }
    CHECK(n == 3);
    const auto cells = sweep_cells(s, s.grid);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Scenario cell = load_scenario(dir.path / ("beta_sweep_cell" + std::to_string(i) + ".ini"));
        CHECK(cell == cells[i]);
    }

    Scenario empty = s;
    empty.grid.clear();
    empty.name = "empty";
    o.emit_configs = false;
    CHECK(cmd_sweep(empty, o, out) == kExitOk);
    const std::string only_header = read_file(dir.path / "empty_sweep.csv");
    CHECK(std::count(only_header.begin(), only_header.end(), '\n') == 1);
}

TEST_CASE("binary exit codes") {
    TempDir dir;
    const fs::path log = dir.path / "log.txt";
    const std::string out = " --out \"" + dir.path.string() + "\"";
    CHECK(run_cli("classify --config \"" + (scenario_dir / "blowup_power.ini").string() + "\"", log) == 0);
    CHECK(read_file(log).find("FINITE") != std::string::npos);
    CHECK(run_cli("solve --config \"" + (scenario_dir / "cosh.ini").string() + "\"" + out, log) == 0);
    CHECK(run_cli("rates --seedless --config \"" + (scenario_dir / "blowup_power.ini").string() + "\"", log) == 0);

    CHECK(run_cli("solve --config /nonexistent.ini", log) == 1);
    std::ofstream(dir.path / "bad.ini") << "[scenario]\nx0 = -2\n";
    CHECK(run_cli("solve --config \"" + (dir.path / "bad.ini").string() + "\"" + out, log) == 1);
    CHECK(run_cli("bogus", log) == 1);
    CHECK(run_cli("sweep --grid speed=1,2 --config \"" + (scenario_dir / "cosh.ini").string() + "\"" + out, log) == 1);

    CHECK(run_cli("rates --config \"" + (scenario_dir / "degenerate_kernel.ini").string() + "\" --t-end 10", log) == 2);

    std::ofstream(dir.path / "tiny.ini") << base << "[solver]\nmax_steps = 3\nt_end = 5\n";
    CHECK(run_cli("solve --config \"" + (dir.path / "tiny.ini").string() + "\"" + out, log) == 3);
}
