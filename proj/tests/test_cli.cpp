// End-to-end checks of the CLI binary: exit codes, file outputs, determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

#ifndef PERTHULL_BIN
#error "PERTHULL_BIN must point at the CLI binary"
#endif

namespace {

int run(const std::string& args, std::string* output = nullptr) {
    const std::string cmd = std::string(PERTHULL_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    if (output) *output = out;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("perthull_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("verify passes on a fresh build and fails under the kappa hook") {
    std::string out;
    CHECK(run("verify", &out) == 0);
    CHECK(out.find("FAIL") == std::string::npos);
    CHECK(run("verify --test-perturb-kappa 0.001", &out) == 1);
    CHECK(out.find("FAIL") != std::string::npos);
}

TEST_CASE("regimes: kinks of the beta curve sit at the three boundaries") {
    const fs::path dir = temp_dir("regimes");
    CHECK(run("regimes --d 2 --alpha-min -3 --alpha-max 1.5 --alpha-step 0.125 --out " +
              dir.string()) == 0);
    std::ifstream is(dir / "beta_curve.csv");
    REQUIRE(is.good());
    std::string line;
    std::getline(is, line);
    CHECK(line == "alpha,beta,regime");
    std::vector<double> alpha, beta;
    while (std::getline(is, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        alpha.push_back(std::stod(line.substr(0, c1)));
        beta.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    REQUIRE(alpha.size() > 10);
    // Discrete slope changes exactly at -2, 0, 2/3 and nowhere else.
    std::vector<double> kinks;
    for (size_t i = 1; i + 1 < alpha.size(); ++i) {
        const double left = (beta[i] - beta[i - 1]) / (alpha[i] - alpha[i - 1]);
        const double right = (beta[i + 1] - beta[i]) / (alpha[i + 1] - alpha[i]);
        if (std::fabs(left - right) > 1e-9) kinks.push_back(alpha[i]);
    }
    REQUIRE(kinks.size() == 3);
    CHECK(kinks[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(kinks[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(kinks[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    // The point-mass regime appears as the sentinel density row.
    const std::string nu = slurp(dir / "nu_density.csv");
    CHECK(nu.find("inf,SUB") != std::string::npos);
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("simulate: config validation and byte-identical reruns") {
    const fs::path dir = temp_dir("simulate");
    const fs::path cfg = dir / "config.json";
    {
        std::ofstream os(cfg);
        os << R"({"d":2,"alpha":0.0,"kind":"poisson","scales":[200,400],)"
           << R"("replications":8,"seed":5150,"threads":2})";
    }
    const fs::path out1 = dir / "run1";
    const fs::path out2 = dir / "run2";
    CHECK(run("simulate --config " + cfg.string() + " --out " + out1.string()) == 0);
    CHECK(run("simulate --config " + cfg.string() + " --out " + out2.string()) == 0);
    const std::string r1 = slurp(out1 / "moments.json");
    CHECK(!r1.empty());
    CHECK(r1 == slurp(out2 / "moments.json"));
    CHECK(slurp(out1 / "moments.csv") == slurp(out2 / "moments.csv"));
    CHECK(fs::exists(out1 / "manifest.json"));

    // Missing required key.
    const fs::path bad1 = dir / "bad1.json";
    {
        std::ofstream os(bad1);
        os << R"({"d":2,"alpha":0.0,"kind":"poisson","scales":[100]})";
    }
    std::string out;
    CHECK(run("simulate --config " + bad1.string() + " --out " + (dir / "x").string(),
              &out) == 2);
    CHECK(out.find("replications") != std::string::npos);

    // Unknown key.
    const fs::path bad2 = dir / "bad2.json";
    {
        std::ofstream os(bad2);
        os << R"({"d":2,"alpha":0.0,"kind":"poisson","scales":[100],)"
           << R"("replications":4,"bogus_knob":1})";
    }
    CHECK(run("simulate --config " + bad2.string() + " --out " + (dir / "y").string(),
              &out) == 2);
    CHECK(out.find("bogus_knob") != std::string::npos);
}

TEST_CASE("limit: festoon sample files") {
    const fs::path dir = temp_dir("limit");
    CHECK(run("limit --d 2 --alpha 0 --L 6 --H 4 --reps 2 --seed 7 --out " +
              dir.string()) == 0);
    const std::string pts = slurp(dir / "festoon_points_0.csv");
    CHECK(pts.rfind("v0,h,is_ext,xi_0,xi_1", 0) == 0);
    const std::string env = slurp(dir / "festoon_envelope_0.csv");
    CHECK(env.rfind("v0,boundary_h", 0) == 0);
    CHECK(fs::exists(dir / "festoon_points_1.csv"));
}

TEST_CASE("constants: rational alpha literal and JSON output") {
    const fs::path dir = temp_dir("constants");
    std::string out;
    CHECK(run("constants --d 2 --alpha -2/1 --k 0 --reps 60 --nodes 4 --hcap 2 "
              "--threads 2 --out " + dir.string(), &out) == 0);
    CHECK(out.find("RHS") != std::string::npos);
    CHECK(fs::exists(dir / "constants.json"));
}
