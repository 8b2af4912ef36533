// End-to-end checks of the command-line tool: exit codes, artifact layout,
// byte-stable reports.  The binary path arrives via MACHLIMIT_BIN.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* p = std::getenv("MACHLIMIT_BIN");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = "\"" + binary() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("machlimit_cli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

}  // namespace

TEST_CASE("missing subcommand or config fails fast") {
    const fs::path d = fresh_dir("usage");
    CHECK(run("", d / "log0.txt") != 0);
    CHECK(run("simulate", d / "log1.txt") != 0);
}

TEST_CASE("malformed config exits 2 and names the field") {
    const fs::path d = fresh_dir("badcfg");
    write(d / "bad.cfg", "params.epsilon = -0.5\n");
    const int rc = run("simulate --config \"" + (d / "bad.cfg").string() + "\" --out \"" +
                           (d / "out").string() + "\"",
                       d / "log.txt");
    CHECK(rc == 2);
    CHECK(slurp(d / "log.txt").find("epsilon") != std::string::npos);

    write(d / "unknown.cfg", "sim.dt = 0.1\n");
    const int rc2 = run("simulate --config \"" + (d / "unknown.cfg").string() + "\" --out \"" +
                            (d / "out").string() + "\"",
                        d / "log2.txt");
    CHECK(rc2 == 2);
    CHECK(slurp(d / "log2.txt").find("sim.dt") != std::string::npos);
}

TEST_CASE("simulate emits a trajectory with provenance") {
    const fs::path d = fresh_dir("simulate");
    write(d / "run.cfg", "sim.T = 0.05\nparams.epsilon = 0.1\n");
    const int rc = run("simulate --config \"" + (d / "run.cfg").string() + "\" --out \"" +
                           (d / "out").string() + "\"",
                       d / "log.txt");
    CHECK(rc == 0);
    const std::string csv = slurp(d / "out" / "trajectory.csv");
    CHECK(csv.find("# params.epsilon = 0.1") != std::string::npos);
    CHECK(csv.find("t,mass,sup_u,sup_eta") != std::string::npos);
}

TEST_CASE("check-symmetrizer is deterministic byte for byte") {
    const fs::path d = fresh_dir("determinism");
    write(d / "run.cfg", "seed = 42\n");
    const std::string cfg = (d / "run.cfg").string();
    REQUIRE(run("check-symmetrizer --config \"" + cfg + "\" --out \"" + (d / "a").string() + "\"",
                d / "log_a.txt") == 0);
    REQUIRE(run("check-symmetrizer --config \"" + cfg + "\" --out \"" + (d / "b").string() + "\"",
                d / "log_b.txt") == 0);
    CHECK(slurp(d / "a" / "symmetrizer_report.csv") == slurp(d / "b" / "symmetrizer_report.csv"));
    CHECK(slurp(d / "a" / "blocks_comparison.csv") == slurp(d / "b" / "blocks_comparison.csv"));

    // A different seed still passes but samples differently.
    REQUIRE(run("check-symmetrizer --config \"" + cfg + "\" --seed 7 --out \"" + (d / "c").string() + "\"",
                d / "log_c.txt") == 0);
    CHECK(slurp(d / "a" / "symmetrizer_report.csv") != slurp(d / "c" / "symmetrizer_report.csv"));
}

TEST_CASE("check-identities passes at the documented tolerance") {
    const fs::path d = fresh_dir("identities");
    write(d / "run.cfg", "norms.s = 1\nseed = 42\n");  // s=1 keeps this smoke test quick
    const int rc = run("check-identities --config \"" + (d / "run.cfg").string() + "\" --out \"" +
                           (d / "out").string() + "\"",
                       d / "log.txt");
    CHECK(rc == 0);
    const std::string csv = slurp(d / "out" / "identities.csv");
    CHECK(csv.find("verdict = PASS") != std::string::npos);
}

TEST_CASE("reference emits series and snapshot artifacts") {
    const fs::path d = fresh_dir("reference");
    write(d / "run.cfg", "sim.T = 0.2\nsim.sample_every = 2\n");
    const int rc = run("reference --config \"" + (d / "run.cfg").string() + "\" --out \"" +
                           (d / "out").string() + "\"",
                       d / "log.txt");
    CHECK(rc == 0);
    CHECK(fs::exists(d / "out" / "reference_series.csv"));
    CHECK(fs::exists(d / "out" / "reference_final_fields.csv"));
    const std::string csv = slurp(d / "out" / "reference_series.csv");
    CHECK(csv.find("err_l2_vs_exact") != std::string::npos);
}

TEST_CASE("sweep writes the report and the log-log plot data") {
    const fs::path d = fresh_dir("sweep");
    // Small horizon keeps this an artifact-shape test; the acceptance suite
    // runs the full-length sweep.
    write(d / "run.cfg", "sim.T = 0.02\nsweep.eps_list = 0.2, 0.1, 0.05\n");
    const int rc = run("sweep --config \"" + (d / "run.cfg").string() + "\" --out \"" +
                           (d / "out").string() + "\"",
                       d / "log.txt");
    CHECK(rc == 0);
    const std::string csv = slurp(d / "out" / "sweep_report.csv");
    CHECK(csv.find("eps,sup_E_fields,sup_E_stress,E_fields_over_eps,E_stress_over_sqrt_eps") !=
          std::string::npos);
    CHECK(csv.find("# slope_fields") != std::string::npos);
    CHECK(csv.find("# K =") != std::string::npos);
    CHECK(fs::exists(d / "out" / "sweep_loglog.csv"));
}
