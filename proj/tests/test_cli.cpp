#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end checks of the installed binary: every subcommand is driven
// through a shell, and stdout/stderr/exit codes are compared against the
// documented contract.

namespace {

using nlohmann::json;

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

int g_serial = 0;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CmdResult run_cli(const std::string& args) {
    const std::string err_path =
        "/tmp/parres_cli_stderr_" + std::to_string(g_serial++) + ".txt";
    const std::string cmd =
        std::string(PARRES_CLI_PATH) + " " + args + " 2>" + err_path;
    CmdResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char chunk[4096];
    size_t got;
    while ((got = fread(chunk, 1, sizeof(chunk), pipe)) > 0)
        r.out.append(chunk, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_path);
    std::remove(err_path.c_str());
    return r;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (const char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("classify reports the resonant kicked map as hyperbolic with mu one") {
    const auto r = run_cli("classify --omega 1 --T 6.283185307 --alpha 1");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["class"] == "hyperbolic");
    CHECK(doc["mu"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(doc["trace"].get<double>() ==
          doctest::Approx(2.0 * std::cosh(1.0)).epsilon(1e-9));
    CHECK(doc["eigenvalues"][0]["im"].get<double>() == 0.0);
    CHECK(doc["M"].size() == 2);

    const auto csv = run_cli(
        "classify --omega 1 --T 6.283185307 --alpha 1 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.find("class,hyperbolic\n") != std::string::npos);
    CHECK(csv.out.rfind("key,value\n", 0) == 0);
}

TEST_CASE("classify tags the unperturbed oscillator elliptic with Omega equal to omega T") {
    const auto r = run_cli("classify --alpha 0 --omega 1 --T 1");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["class"] == "elliptic");
    CHECK(doc["Omega"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("heff emits a traceless generator consistent with the invariant form") {
    const auto r = run_cli("heff --omega 1 --T 1 --alpha 0.5");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["reflection_factor"] == false);
    const double g11 = doc["G"][0][0].get<double>();
    const double g22 = doc["G"][1][1].get<double>();
    CHECK(g11 == -g22);
    CHECK(doc["regime"]["normal_form"] == "elliptic");
    CHECK(doc["regime"]["Omega_sq"].get<double>() > 0.0);
    CHECK(doc["proportionality"]["residual"].get<double>() < 1e-10);
    CHECK(doc["dsq"].get<double>() < 0.0);
}

TEST_CASE("spectrum snaps a truncated rational angle to exactly three classes") {
    const auto r = run_cli("spectrum --OmegaT 2.0943951 --n-max 8");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["regime"] == "elliptic");
    CHECK(doc["rational"] == true);
    CHECK(doc["r"].get<long long>() == 1);
    CHECK(doc["s"].get<long long>() == 3);
    REQUIRE(doc["classes"].size() == 3);
    CHECK(doc["classes"][0]["members"] == json::array({0, 3, 6}));
    CHECK(doc["classes"][1]["members"] == json::array({1, 4, 7}));
    CHECK(doc["classes"][2]["members"] == json::array({2, 5, 8}));
    CHECK(doc["eps"].size() == 9);

    const auto csv = run_cli("spectrum --OmegaT 2.0943951 --n-max 8 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("n,eps\n", 0) == 0);
    CHECK(count_lines(csv.out) == 10);
}

TEST_CASE("spectrum in the marginal regime lists paired momentum partners") {
    const auto r = run_cli(
        "spectrum --regime marginal --P0 0 --T 6.283185307179586 --k-max 6");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    REQUIRE(doc["values"].size() == 14);
    CHECK(doc["values"][2].get<double>() ==
          doctest::Approx(1.4142135623730951).epsilon(1e-12));
    CHECK(doc["max_phase_deviation"].get<double>() < 1e-12);

    const auto missing = run_cli("spectrum --regime elliptic --n-max 4");
    CHECK(missing.exit_code == 1);
    CHECK(json::parse(missing.err)["error"]["kind"] == "validation");
}

TEST_CASE("evolve fits the resonant variance growth exponent to the kick strength") {
    const auto r = run_cli("evolve --alpha 1 --resonant --periods 30");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["class"] == "hyperbolic");
    CHECK(doc["mu"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(doc["fitted_exponent"].get<double>() == doctest::Approx(1.0).epsilon(0.01));
    CHECK(doc["det_drift"].get<double>() < 1e-10);
    CHECK(doc["trajectory"].size() == 30);

    const auto csv = run_cli("evolve --alpha 1 --resonant --periods 5 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("n,sigma_xx,sigma_xp,sigma_pp,lambda_max\n", 0) == 0);
    CHECK(count_lines(csv.out) == 6);
}

TEST_CASE("evolve accepts a custom covariance only as a complete triple") {
    const auto r = run_cli(
        "evolve --alpha 0.5 --resonant --periods 4 --sxx 1 --sxp 0 --spp 1");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["det_drift"].get<double>() < 1e-10);

    const auto partial = run_cli("evolve --alpha 0.5 --periods 4 --sxx 1");
    CHECK(partial.exit_code == 1);
    CHECK(json::parse(partial.err)["error"]["kind"] == "parse");

    const auto squeezed = run_cli(
        "evolve --alpha 0.5 --periods 4 --sxx 0.01 --sxp 0 --spp 0.01");
    CHECK(squeezed.exit_code == 1);
    CHECK(json::parse(squeezed.err)["error"]["kind"] == "validation");
}

TEST_CASE("eigenstate reports two boundary residual terms and exact interior cancellation") {
    const auto r = run_cli("eigenstate --x0 1 --mu 0 --alpha 1 --N 10");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["entries"].size() == 21);
    CHECK(doc["residual"]["boundary_terms"] == 2);
    CHECK(doc["residual"]["interior_max_rel"].get<double>() == 0.0);
    CHECK(doc["residual"]["entries"].size() == 2);
    CHECK(doc["residual"]["entries"][0]["n"] == -10);
    CHECK(doc["residual"]["entries"][1]["n"] == 11);
}

TEST_CASE("eigenstate rejects positions outside the fundamental interval unless normalized") {
    const auto bad = run_cli("eigenstate --x0 0.5 --mu 0.3 --alpha 1 --N 4");
    CHECK(bad.exit_code == 1);
    const auto err = json::parse(bad.err);
    CHECK(err["error"]["kind"] == "validation");
    CHECK(err["error"]["message"].get<std::string>().find("fundamental") !=
          std::string::npos);

    const auto ok = run_cli("eigenstate --x0 0.5 --mu 0.3 --alpha 1 --N 4 --normalize");
    REQUIRE(ok.exit_code == 0);
    const auto doc = json::parse(ok.out);
    CHECK(doc["x0"].get<double>() ==
          doctest::Approx(1.3591409142295225).epsilon(1e-14));
    CHECK(doc["normalized_from"].get<double>() == 0.5);
    CHECK(doc["ladder_shift"] == 1);

    const auto csv = run_cli(
        "eigenstate --x0 1 --mu 0 --alpha 1 --N 4 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("n,position,re,im\n", 0) == 0);
    CHECK(count_lines(csv.out) == 10);
}

TEST_CASE("mathieu-boundary agrees between slice products and the integrator oracle") {
    const auto r = run_cli(
        "mathieu-boundary --l-min 0.6 --l-max 0.9 --delta-l 0.4 --method both");
    REQUIRE(r.exit_code == 0);
    const auto doc = json::parse(r.out);
    REQUIRE(doc["slices"].size() == 1);
    REQUIRE(doc["rk4"].size() == 1);
    CHECK(doc["slices"][0]["side"] == -1);
    CHECK(doc["rk4"][0]["side"] == -1);
    CHECK(doc["max_gap"].get<double>() < 1e-6);
    CHECK(std::abs(doc["slices"][0]["param"].get<double>() -
                   doc["rk4"][0]["param"].get<double>()) < 1e-6);

    const auto csv = run_cli(
        "mathieu-boundary --l-min 0.6 --l-max 0.9 --delta-l 0.4 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("method,param,side\n", 0) == 0);
    CHECK(csv.out.find("slices,") != std::string::npos);
    CHECK(csv.out.find("rk4,") != std::string::npos);
}

TEST_CASE("mathieu-boundary exits with the numerical code when no crossing exists") {
    const auto r = run_cli(
        "mathieu-boundary --l-min 1.3 --l-max 1.4 --delta-l 0.0001 --method rk4");
    CHECK(r.exit_code == 2);
    CHECK(json::parse(r.err)["error"]["kind"] == "numerical");
}

TEST_CASE("chart renders are byte-identical across runs and formats parse") {
    const std::string flags =
        "chart --p1-min 0.2 --p1-max 6.2 --p1-res 9 --p2-min -1 --p2-max 1 "
        "--p2-res 7";
    const auto a = run_cli(flags);
    const auto b = run_cli(flags);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("param1,param2,class,exponent,trace\n", 0) == 0);
    CHECK(count_lines(a.out) == 64);

    const auto j = run_cli(flags + " --format json");
    REQUIRE(j.exit_code == 0);
    const auto doc = json::parse(j.out);
    REQUIRE(doc.size() == 63);
    CHECK(doc[0].contains("class"));
}

TEST_CASE("chart writes boundary polylines alongside the sweep when asked") {
    const std::string bpath = "/tmp/parres_cli_boundaries.csv";
    const auto r = run_cli(
        "chart --p1-min 0.2 --p1-max 1.2 --p1-res 9 --p2-min 0.3 --p2-max 0.9 "
        "--p2-res 9 --boundaries " + bpath + " --output /tmp/parres_cli_chart.csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    const std::string boundaries = slurp(bpath);
    CHECK(boundaries.rfind("polyline,param1,param2,side\n", 0) == 0);
    CHECK(count_lines(boundaries) > 8);
    const std::string cells = slurp("/tmp/parres_cli_chart.csv");
    CHECK(count_lines(cells) == 82);
    std::remove(bpath.c_str());
    std::remove("/tmp/parres_cli_chart.csv");
}

TEST_CASE("selftest passes, prints one line per criterion, and repeats byte-identically") {
    const auto a = run_cli("selftest --seed 987");
    REQUIRE(a.exit_code == 0);
    CHECK(count_lines(a.out) == 11);
    int pass_lines = 0;
    std::istringstream in(a.out);
    std::string line;
    int id = 0;
    while (std::getline(in, line)) {
        ++id;
        char want[24];
        std::snprintf(want, sizeof(want), "criterion %02d", id);
        CHECK(line.rfind(want, 0) == 0);
        if (line.find(": PASS (") != std::string::npos) ++pass_lines;
    }
    CHECK(pass_lines == 11);

    const auto b = run_cli("selftest --seed 987");
    CHECK(a.out == b.out);

    const auto j = run_cli("selftest --seed 987 --format json");
    REQUIRE(j.exit_code == 0);
    const auto doc = json::parse(j.out);
    REQUIRE(doc.size() == 11);
    for (const auto& item : doc) CHECK(item["passed"] == true);
}

TEST_CASE("config files apply, flags override them, and unknown keys are rejected") {
    const std::string cfg = "/tmp/parres_cli_cfg.ini";
    {
        std::ofstream out(cfg);
        out << "classify.omega=1\nclassify.T=6.283185307\nclassify.alpha=1\n";
    }
    const auto r = run_cli("classify --config " + cfg);
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["class"] == "hyperbolic");

    const auto overridden = run_cli("classify --config " + cfg + " --alpha 0");
    REQUIRE(overridden.exit_code == 0);
    CHECK(json::parse(overridden.out)["class"] == "marginal");

    {
        std::ofstream out(cfg);
        out << "classify.omega=1\nclassify.mystery_knob=3\n";
    }
    const auto bad = run_cli("classify --config " + cfg);
    CHECK(bad.exit_code == 1);
    CHECK(json::parse(bad.err)["error"]["kind"] == "parse");
    std::remove(cfg.c_str());
}

TEST_CASE("flag, subcommand, and domain errors map to the documented exit codes") {
    const auto unknown_flag = run_cli("classify --no-such-flag 1");
    CHECK(unknown_flag.exit_code == 1);
    CHECK(json::parse(unknown_flag.err)["error"]["kind"] == "parse");

    const auto no_sub = run_cli("");
    CHECK(no_sub.exit_code == 1);

    const auto bad_domain = run_cli("classify --T -1");
    CHECK(bad_domain.exit_code == 1);
    CHECK(json::parse(bad_domain.err)["error"]["kind"] == "validation");

    const auto bad_choice = run_cli("chart --family bogus");
    CHECK(bad_choice.exit_code == 1);
    CHECK(json::parse(bad_choice.err)["error"]["kind"] == "parse");

    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("classify") != std::string::npos);
}

TEST_CASE("the output flag writes the document to a file instead of stdout") {
    const std::string path = "/tmp/parres_cli_out.json";
    const auto r = run_cli("classify --alpha 0.3 --output " + path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    const auto doc = json::parse(slurp(path));
    CHECK(doc.contains("class"));
    std::remove(path.c_str());
}
