#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <parres/chart.hpp>
#include <parres/core_classical.hpp>
#include <parres/effective_hamiltonian.hpp>
#include <parres/frequency_modulation.hpp>
#include <parres/quantum_floquet.hpp>
#include <parres/selftest.hpp>

// Command-line surface: every subcommand parses flags (optionally layered
// over a flat key=value config file), runs one library operation, and
// emits CSV or JSON to stdout or a file. Exit codes: 0 success, 1 flag or
// validation failure, 2 numerical failure; errors also appear as a
// one-line JSON object on stderr.

namespace {

using nlohmann::json;
using namespace parres;

constexpr double kTwoPi = 6.283185307179586;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot open output file: " + path);
    out << text;
}

json mat_json(const Mat2& M) {
    return json::array({json::array({M.m11, M.m12}), json::array({M.m21, M.m22})});
}

const char* class_name(const classical::StabilityClass& cls) {
    if (std::holds_alternative<classical::Elliptic>(cls)) return "elliptic";
    if (const auto* h = std::get_if<classical::Hyperbolic>(&cls))
        return h->reflected ? "hyperbolic_reflected" : "hyperbolic";
    return "marginal";
}

// -- classify ----------------------------------------------------------

struct ClassifyOpts {
    double m = 1.0, omega = 1.0, T = 1.0, alpha = 0.0;
    double band = classical::kDefaultBand;
    std::string format = "json", output;
};

void run_classify(const ClassifyOpts& o) {
    const classical::KickedParams p{o.m, o.omega, o.T, o.alpha, 1.0};
    const Mat2 M = classical::monodromy_kicked(p);
    const auto cls = classical::classify(M, o.band);
    const auto eig = classical::eigenvalue_pair(M);
    const auto Q = classical::quadratic_form(M);

    json doc{{"M", mat_json(M)},
             {"trace", M.trace()},
             {"eigenvalues",
              json::array({json{{"re", eig.first.real()}, {"im", eig.first.imag()}},
                           json{{"re", eig.second.real()}, {"im", eig.second.imag()}}})},
             {"class", class_name(cls)},
             {"quadratic_form",
              {{"q_pp", Q.q_pp}, {"q_xx", Q.q_xx}, {"q_xp", Q.q_xp}}}};
    if (const auto* e = std::get_if<classical::Elliptic>(&cls)) {
        doc["Omega"] = e->Omega;
    } else if (const auto* h = std::get_if<classical::Hyperbolic>(&cls)) {
        doc["mu"] = h->mu;
    } else {
        const auto& m = std::get<classical::Marginal>(cls);
        doc["sign"] = m.sign;
        doc["shearing"] = m.shearing;
    }
    if (o.format == "json") {
        emit(doc.dump(2) + "\n", o.output);
        return;
    }
    std::string csv = "key,value\n";
    csv += "m11," + fmt17(M.m11) + "\nm12," + fmt17(M.m12) + "\nm21," +
           fmt17(M.m21) + "\nm22," + fmt17(M.m22) + "\n";
    csv += "trace," + fmt17(M.trace()) + "\n";
    csv += "lambda_plus_re," + fmt17(eig.first.real()) + "\nlambda_plus_im," +
           fmt17(eig.first.imag()) + "\n";
    csv += "lambda_minus_re," + fmt17(eig.second.real()) + "\nlambda_minus_im," +
           fmt17(eig.second.imag()) + "\n";
    csv += std::string("class,") + class_name(cls) + "\n";
    if (doc.contains("Omega")) csv += "Omega," + fmt17(doc["Omega"]) + "\n";
    if (doc.contains("mu")) csv += "mu," + fmt17(doc["mu"]) + "\n";
    csv += "q_pp," + fmt17(Q.q_pp) + "\nq_xx," + fmt17(Q.q_xx) + "\nq_xp," +
           fmt17(Q.q_xp) + "\n";
    emit(csv, o.output);
}

// -- heff --------------------------------------------------------------

struct HeffOpts {
    double m = 1.0, omega = 1.0, T = 1.0, alpha = 0.0, hbar = 1.0;
    double band = classical::kDefaultBand;
    std::string format = "json", output;
};

void run_heff(const HeffOpts& o) {
    const classical::KickedParams p{o.m, o.omega, o.T, o.alpha, o.hbar};
    const Mat2 M = classical::monodromy_kicked(p);
    const auto gen = heff::heff_from_monodromy(M, o.T, o.hbar, o.band);
    const auto red = heff::regime_reduction(gen);
    const char* normal_form =
        red.normal_form == classical::Regime::elliptic     ? "elliptic"
        : red.normal_form == classical::Regime::hyperbolic ? "hyperbolic"
                                                           : "marginal";
    json doc{{"u", gen.u},
             {"v", gen.v},
             {"w", gen.w},
             {"G", mat_json(gen.G)},
             {"delta", gen.delta.delta},
             {"dsq", gen.delta.dsq},
             {"reflection_factor", gen.reflection_factor},
             {"half_trace", gen.half_trace},
             {"regime", {{"normal_form", normal_form}, {"Omega_sq", red.Omega_sq}}}};
    try {
        const auto prop =
            heff::quadratic_form_proportionality(gen, classical::quadratic_form(M));
        doc["proportionality"] = {{"sigma", prop.sigma}, {"residual", prop.residual}};
    } catch (const std::invalid_argument&) {
        doc["proportionality"] = nullptr;  // degenerate invariant form
    }
    if (o.format == "json") {
        emit(doc.dump(2) + "\n", o.output);
        return;
    }
    std::string csv = "key,value\n";
    for (const auto& [k, v] :
         {std::pair<const char*, double>{"u", gen.u}, {"v", gen.v}, {"w", gen.w},
          {"g11", gen.G.m11}, {"g12", gen.G.m12}, {"g21", gen.G.m21},
          {"g22", gen.G.m22}, {"delta", gen.delta.delta}, {"dsq", gen.delta.dsq},
          {"half_trace", gen.half_trace}, {"Omega_sq", red.Omega_sq}})
        csv += std::string(k) + "," + fmt17(v) + "\n";
    csv += std::string("reflection_factor,") + (gen.reflection_factor ? "1" : "0") + "\n";
    csv += std::string("normal_form,") + normal_form + "\n";
    emit(csv, o.output);
}

// -- chart -------------------------------------------------------------

struct ChartOpts {
    std::string family = "kicked";
    double p1_min = 0.0, p1_max = kTwoPi;
    double p2_min = -2.0, p2_max = 2.0;
    int p1_res = 41, p2_res = 41;
    double mass = 1.0, omega0 = 2.0;
    double band = classical::kDefaultBand;
    double slice_tol = 1e-10;
    double boundary_tol = 1e-9;
    std::string boundaries;  // optional polyline CSV path
    std::string format = "csv", output;
};

void run_chart(const ChartOpts& o) {
    chart::SweepSpec spec;
    spec.family = o.family == "kicked" ? chart::Family::kicked : chart::Family::mathieu;
    spec.axis1 = {o.family == "kicked" ? "omega_T" : "l", o.p1_min, o.p1_max, o.p1_res};
    spec.axis2 = {o.family == "kicked" ? "alpha" : "delta_l", o.p2_min, o.p2_max,
                  o.p2_res};
    spec.mass = o.mass;
    spec.omega0 = o.omega0;
    spec.band = o.band;
    spec.slice_tol = o.slice_tol;
    const auto cells = chart::sweep(spec);
    emit(o.format == "json" ? chart::to_json(cells) + "\n" : chart::to_csv(cells),
         o.output);
    if (!o.boundaries.empty()) {
        const auto lines = chart::tongue_boundaries(spec, o.boundary_tol);
        std::ofstream out(o.boundaries, std::ios::binary);
        if (!out)
            throw std::invalid_argument("cannot open boundaries file: " + o.boundaries);
        out << chart::boundaries_to_csv(lines);
    }
}

// -- spectrum ----------------------------------------------------------

struct SpectrumOpts {
    std::string regime = "elliptic";
    double OmegaT = 0.0;
    int n_max = 16;
    // Looser than the library default so rotation angles given to a
    // handful of printed digits still snap to the nearby rational.
    double tol = 1e-8;
    long long denominator_cap = 1000000;
    double P0 = 0.0, T = 1.0, hbar = 1.0;
    int k_max = 8;
    std::string format = "json", output;
};

void run_spectrum(const SpectrumOpts& o, bool have_OmegaT) {
    if (o.regime == "elliptic") {
        if (!have_OmegaT)
            throw std::invalid_argument("spectrum: --OmegaT is required for the elliptic regime");
        const auto spec =
            quantum::elliptic_spectrum(o.OmegaT, o.n_max, o.tol, o.denominator_cap);
        if (o.format == "json") {
            json classes = json::array();
            for (const auto& c : spec.classes)
                classes.push_back({{"value", c.value}, {"members", c.members}});
            json doc{{"regime", "elliptic"},
                     {"rational", spec.rational},
                     {"eps", spec.eps},
                     {"classes", classes},
                     {"max_gap", spec.max_gap},
                     {"descriptor", spec.descriptor}};
            if (spec.rational) {
                doc["r"] = spec.r;
                doc["s"] = spec.s;
            }
            emit(doc.dump(2) + "\n", o.output);
        } else {
            std::string csv = "n,eps\n";
            for (size_t n = 0; n < spec.eps.size(); ++n)
                csv += std::to_string(n) + "," + fmt17(spec.eps[n]) + "\n";
            emit(csv, o.output);
        }
        return;
    }
    if (o.regime != "marginal")
        throw std::invalid_argument("spectrum: --regime must be elliptic or marginal");
    const auto partners = quantum::marginal_partners(o.P0, o.T, o.hbar, o.k_max);
    if (o.format == "json") {
        json doc{{"regime", "marginal"},
                 {"values", partners.values},
                 {"max_phase_deviation", partners.max_phase_deviation}};
        emit(doc.dump(2) + "\n", o.output);
    } else {
        std::string csv = "index,value\n";
        for (size_t i = 0; i < partners.values.size(); ++i)
            csv += std::to_string(i) + "," + fmt17(partners.values[i]) + "\n";
        emit(csv, o.output);
    }
}

// -- evolve ------------------------------------------------------------

struct EvolveOpts {
    double m = 1.0, omega = 1.0, T = 1.0, alpha = 0.0, hbar = 1.0;
    bool resonant = false;
    int periods = 30;
    double sxx = 0.0, sxp = 0.0, spp = 0.0;
    bool have_cov = false;
    std::string format = "json", output;
};

void run_evolve(const EvolveOpts& o) {
    double omega = o.omega, T = o.T;
    if (o.resonant) {
        omega = 1.0;
        T = kTwoPi;
    }
    if (o.periods < 1)
        throw std::invalid_argument("evolve: --periods must be at least 1");
    const classical::KickedParams p{o.m, omega, T, o.alpha, o.hbar};
    const Mat2 M = classical::monodromy_kicked(p);
    const auto cls = classical::classify(M);
    auto state = o.have_cov
                     ? quantum::GaussianState::from_covariance({0.0, 0.0}, o.sxx,
                                                               o.sxp, o.spp, o.hbar)
                     : quantum::GaussianState::vacuum(o.hbar);
    const double det0 = state.det_cov;

    json trajectory = json::array();
    std::string csv = "n,sigma_xx,sigma_xp,sigma_pp,lambda_max\n";
    for (int n = 1; n <= o.periods; ++n) {
        state = quantum::propagate_gaussian(state, M, 1);
        const Mat2 S = state.covariance();
        trajectory.push_back({{"n", n},
                              {"sigma_xx", S.m11},
                              {"sigma_xp", S.m12},
                              {"sigma_pp", S.m22},
                              {"lambda_max", state.sigma_max_eigenvalue()}});
        csv += std::to_string(n) + "," + fmt17(S.m11) + "," + fmt17(S.m12) + "," +
               fmt17(S.m22) + "," + fmt17(state.sigma_max_eigenvalue()) + "\n";
    }

    json doc{{"class", class_name(cls)},
             {"periods", o.periods},
             {"det_drift", std::abs(state.det_cov / det0 - 1.0)},
             {"final",
              {{"mean", json::array({state.mean.x, state.mean.p})},
               {"sigma", mat_json(state.covariance())}}},
             {"trajectory", trajectory}};
    if (const auto* h = std::get_if<classical::Hyperbolic>(&cls)) {
        doc["mu"] = h->mu;
        if (o.periods >= 4)
            doc["fitted_exponent"] =
                quantum::variance_growth_exponent(M, o.periods, o.hbar);
    } else if (const auto* e = std::get_if<classical::Elliptic>(&cls)) {
        doc["Omega"] = e->Omega;
    }
    emit(o.format == "json" ? doc.dump(2) + "\n" : csv, o.output);
}

// -- eigenstate --------------------------------------------------------

struct EigenstateOpts {
    double x0 = 1.0, mu = 0.0, alpha = 0.0;
    int N = 10;
    bool normalize = false;
    std::string format = "json", output;
};

void run_eigenstate(const EigenstateOpts& o) {
    double x0 = o.x0;
    int ladder_shift = 0;
    if (o.normalize) {
        const auto norm = quantum::normalize_to_fundamental(o.x0, o.alpha);
        x0 = norm.x0;
        ladder_shift = norm.n;
    }
    const auto comb = quantum::build_resonant_eigenstate(x0, o.mu, o.alpha, o.N);
    const auto res = quantum::eigen_residual(comb);

    auto entry_json = [](const quantum::CombEntry& e) {
        return json{{"n", e.n},
                    {"position", e.position},
                    {"re", e.amplitude.real()},
                    {"im", e.amplitude.imag()}};
    };
    json entries = json::array();
    for (const auto& e : comb.entries) entries.push_back(entry_json(e));
    json residual_entries = json::array();
    for (const auto& e : res.residual_entries) residual_entries.push_back(entry_json(e));
    json doc{{"x0", comb.x0},
             {"mu", comb.mu},
             {"alpha", comb.alpha},
             {"N", comb.half_width},
             {"entries", entries},
             {"residual",
              {{"boundary_terms", res.boundary_terms},
               {"interior_max_rel", res.interior_max_rel},
               {"residual_norm_sq", res.residual_norm_sq},
               {"entries", residual_entries}}}};
    if (o.normalize) {
        doc["normalized_from"] = o.x0;
        doc["ladder_shift"] = ladder_shift;
    }
    if (o.format == "json") {
        emit(doc.dump(2) + "\n", o.output);
        return;
    }
    std::string csv = "n,position,re,im\n";
    for (const auto& e : comb.entries)
        csv += std::to_string(e.n) + "," + fmt17(e.position) + "," +
               fmt17(e.amplitude.real()) + "," + fmt17(e.amplitude.imag()) + "\n";
    emit(csv, o.output);
}

// -- mathieu-boundary --------------------------------------------------

struct MathieuBoundaryOpts {
    double l_min = 0.5, l_max = 1.5;
    double delta_l = 0.4;
    double omega0 = 2.0, mass = 1.0;
    std::string method = "both";
    double tol = 1e-9, slice_tol = 1e-10;
    int rk4_steps = 6000, subdivisions = 64;
    std::string format = "json", output;
};

void run_mathieu_boundary(const MathieuBoundaryOpts& o) {
    if (o.method != "slices" && o.method != "rk4" && o.method != "both")
        throw std::invalid_argument("mathieu-boundary: --method must be slices, rk4, or both");
    const freq::Mathieu base{1.0, o.delta_l, o.omega0};
    auto slice_family = [&](double l) {
        freq::Mathieu prof = base;
        prof.l = l;
        return freq::monodromy_converged(prof, o.mass, o.slice_tol).result;
    };
    auto rk4_family = [&](double l) {
        freq::Mathieu prof = base;
        prof.l = l;
        return freq::rk4_oracle(prof, o.mass, o.rk4_steps);
    };
    std::vector<freq::BoundaryPoint> slices, rk4;
    if (o.method != "rk4")
        slices = freq::trace_boundary(slice_family, o.l_min, o.l_max, o.tol,
                                      o.subdivisions);
    if (o.method != "slices")
        rk4 = freq::trace_boundary(rk4_family, o.l_min, o.l_max, o.tol,
                                   o.subdivisions);

    auto roots_json = [](const std::vector<freq::BoundaryPoint>& roots) {
        json arr = json::array();
        for (const auto& r : roots)
            arr.push_back({{"param", r.param}, {"side", r.side}});
        return arr;
    };
    json doc{{"l_range", json::array({o.l_min, o.l_max})},
             {"delta_l", o.delta_l},
             {"omega0", o.omega0},
             {"method", o.method}};
    if (o.method != "rk4") doc["slices"] = roots_json(slices);
    if (o.method != "slices") doc["rk4"] = roots_json(rk4);
    if (o.method == "both") {
        if (slices.size() == rk4.size()) {
            double gap = 0.0;
            for (size_t i = 0; i < slices.size(); ++i)
                gap = std::max(gap, std::abs(slices[i].param - rk4[i].param));
            doc["max_gap"] = gap;
        } else {
            doc["max_gap"] = nullptr;
        }
    }
    if (o.format == "json") {
        emit(doc.dump(2) + "\n", o.output);
        return;
    }
    std::string csv = "method,param,side\n";
    for (const auto& r : slices)
        csv += "slices," + fmt17(r.param) + "," + std::to_string(r.side) + "\n";
    for (const auto& r : rk4)
        csv += "rk4," + fmt17(r.param) + "," + std::to_string(r.side) + "\n";
    emit(csv, o.output);
}

// -- selftest ----------------------------------------------------------

struct SelftestOpts {
    std::uint64_t seed = 20240817u;
    std::string format = "text", output;
};

int run_selftest(const SelftestOpts& o) {
    const auto results = selftest::run_all(o.seed);
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& r : results)
            arr.push_back({{"id", r.id},
                           {"name", r.name},
                           {"passed", r.passed},
                           {"detail", r.detail}});
        emit(arr.dump(2) + "\n", o.output);
    } else {
        emit(selftest::report(results), o.output);
    }
    return selftest::all_passed(results) ? 0 : 2;
}

void add_format(CLI::App* sub, std::string& format, std::string& output,
                std::vector<std::string> choices = {"csv", "json"}) {
    sub->fallthrough();  // lets --config reach the main app after the subcommand
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember(choices))
        ->capture_default_str();
    sub->add_option("--output", output, "Write to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric-resonance toolbox: monodromy classification, "
                 "effective generators, stability charts, Floquet spectra, "
                 "and resonant comb eigenstates"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Flat key=value config file; keys are dotted with the "
                   "subcommand name (classify.omega=2), and command-line "
                   "flags override file entries");
    app.allow_config_extras(CLI::config_extras_mode::error);
    int exit_code = 0;

    ClassifyOpts co;
    auto* classify = app.add_subcommand(
        "classify", "Classify the one-period map of a kicked oscillator");
    classify->add_option("--m", co.m, "Mass")->capture_default_str();
    classify->add_option("--omega", co.omega, "Natural frequency")->capture_default_str();
    classify->add_option("--T", co.T, "Drive period")->capture_default_str();
    classify->add_option("--alpha", co.alpha, "Squeeze kick strength")->capture_default_str();
    classify->add_option("--band", co.band, "Marginal trace band")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_format(classify, co.format, co.output);
    classify->callback([&] { run_classify(co); });

    HeffOpts ho;
    auto* heff_cmd = app.add_subcommand(
        "heff", "Extract the effective quadratic generator of the period map");
    heff_cmd->add_option("--m", ho.m, "Mass")->capture_default_str();
    heff_cmd->add_option("--omega", ho.omega, "Natural frequency")->capture_default_str();
    heff_cmd->add_option("--T", ho.T, "Drive period")->capture_default_str();
    heff_cmd->add_option("--alpha", ho.alpha, "Squeeze kick strength")->capture_default_str();
    heff_cmd->add_option("--hbar", ho.hbar, "Reduced Planck constant")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    heff_cmd->add_option("--band", ho.band, "Marginal trace band")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_format(heff_cmd, ho.format, ho.output);
    heff_cmd->callback([&] { run_heff(ho); });

    ChartOpts cho;
    auto* chart_cmd = app.add_subcommand(
        "chart", "Sweep a parameter plane and tag each cell by stability class");
    chart_cmd->add_option("--family", cho.family, "Sweep family")
        ->check(CLI::IsMember({"kicked", "mathieu"}))
        ->capture_default_str();
    chart_cmd->add_option("--p1-min", cho.p1_min, "Axis-1 lower edge")->capture_default_str();
    chart_cmd->add_option("--p1-max", cho.p1_max, "Axis-1 upper edge")->capture_default_str();
    chart_cmd->add_option("--p1-res", cho.p1_res, "Axis-1 grid points")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    chart_cmd->add_option("--p2-min", cho.p2_min, "Axis-2 lower edge")->capture_default_str();
    chart_cmd->add_option("--p2-max", cho.p2_max, "Axis-2 upper edge")->capture_default_str();
    chart_cmd->add_option("--p2-res", cho.p2_res, "Axis-2 grid points")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    chart_cmd->add_option("--mass", cho.mass, "Mass")->capture_default_str();
    chart_cmd->add_option("--omega0", cho.omega0, "Mathieu drive frequency")
        ->capture_default_str();
    chart_cmd->add_option("--band", cho.band, "Marginal trace band")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    chart_cmd->add_option("--slice-tol", cho.slice_tol, "Mathieu slice-product tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    chart_cmd->add_option("--boundaries", cho.boundaries,
                          "Also write refined tongue-boundary polylines to this CSV file");
    chart_cmd->add_option("--boundary-tol", cho.boundary_tol,
                          "Bisection tolerance for boundary refinement")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_format(chart_cmd, cho.format, cho.output);
    chart_cmd->callback([&] { run_chart(cho); });

    SpectrumOpts so;
    auto* spectrum = app.add_subcommand(
        "spectrum", "Floquet quasi-energy structure in the elliptic or marginal regime");
    spectrum->add_option("--regime", so.regime, "Spectrum regime")
        ->check(CLI::IsMember({"elliptic", "marginal"}))
        ->capture_default_str();
    auto* omegaT_opt =
        spectrum->add_option("--OmegaT", so.OmegaT, "Rotation angle per period");
    spectrum->add_option("--n-max", so.n_max, "Largest ladder index")
        ->check(CLI::Range(0, 10000000))
        ->capture_default_str();
    spectrum->add_option("--tol", so.tol, "Rationality detection tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    spectrum->add_option("--denominator-cap", so.denominator_cap,
                         "Largest denominator treated as rational")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    spectrum->add_option("--P0", so.P0, "Base momentum (marginal regime)")
        ->capture_default_str();
    spectrum->add_option("--T", so.T, "Drive period (marginal regime)")
        ->capture_default_str();
    spectrum->add_option("--hbar", so.hbar, "Reduced Planck constant")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    spectrum->add_option("--k-max", so.k_max, "Partner pairs to list (marginal regime)")
        ->check(CLI::Range(0, 10000000))
        ->capture_default_str();
    add_format(spectrum, so.format, so.output);
    spectrum->callback([&] { run_spectrum(so, omegaT_opt->count() > 0); });

    EvolveOpts eo;
    auto* evolve = app.add_subcommand(
        "evolve", "Propagate a Gaussian state through repeated drive periods");
    evolve->add_option("--m", eo.m, "Mass")->capture_default_str();
    evolve->add_option("--omega", eo.omega, "Natural frequency")->capture_default_str();
    evolve->add_option("--T", eo.T, "Drive period")->capture_default_str();
    evolve->add_option("--alpha", eo.alpha, "Squeeze kick strength")->capture_default_str();
    evolve->add_option("--hbar", eo.hbar, "Reduced Planck constant")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    evolve->add_flag("--resonant", eo.resonant,
                     "Shorthand for omega = 1 and T = 2 pi (full-turn resonance)");
    evolve->add_option("--periods", eo.periods, "Number of periods")
        ->check(CLI::Range(1, 10000000))
        ->capture_default_str();
    auto* sxx = evolve->add_option("--sxx", eo.sxx, "Initial sigma_xx");
    auto* sxp = evolve->add_option("--sxp", eo.sxp, "Initial sigma_xp");
    auto* spp = evolve->add_option("--spp", eo.spp, "Initial sigma_pp");
    sxx->needs(sxp)->needs(spp);
    sxp->needs(sxx)->needs(spp);
    spp->needs(sxx)->needs(sxp);
    add_format(evolve, eo.format, eo.output);
    evolve->callback([&] {
        eo.have_cov = sxx->count() > 0;
        run_evolve(eo);
    });

    EigenstateOpts go;
    auto* eigenstate = app.add_subcommand(
        "eigenstate", "Build a resonant comb eigenstate and report its residual");
    eigenstate->add_option("--x0", go.x0, "Base position in the fundamental interval")
        ->required();
    eigenstate->add_option("--mu", go.mu, "Eigenphase per rung")->capture_default_str();
    eigenstate->add_option("--alpha", go.alpha, "Squeeze kick strength")->required();
    eigenstate->add_option("--N", go.N, "Truncation half-width")
        ->check(CLI::Range(1, 10000000))
        ->capture_default_str();
    eigenstate->add_flag("--normalize", go.normalize,
                         "Fold --x0 into the fundamental interval first");
    add_format(eigenstate, go.format, go.output);
    eigenstate->callback([&] { run_eigenstate(go); });

    MathieuBoundaryOpts mo;
    auto* mathieu_boundary = app.add_subcommand(
        "mathieu-boundary", "Locate stability-boundary crossings of the Mathieu family");
    mathieu_boundary->add_option("--l-min", mo.l_min, "Scan lower edge in l")
        ->capture_default_str();
    mathieu_boundary->add_option("--l-max", mo.l_max, "Scan upper edge in l")
        ->capture_default_str();
    mathieu_boundary->add_option("--delta-l", mo.delta_l, "Modulation depth")
        ->capture_default_str();
    mathieu_boundary->add_option("--omega0", mo.omega0, "Drive frequency")
        ->capture_default_str();
    mathieu_boundary->add_option("--mass", mo.mass, "Mass")->capture_default_str();
    mathieu_boundary->add_option("--method", mo.method, "Monodromy construction")
        ->check(CLI::IsMember({"slices", "rk4", "both"}))
        ->capture_default_str();
    mathieu_boundary->add_option("--tol", mo.tol, "Bisection tolerance in l")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mathieu_boundary->add_option("--slice-tol", mo.slice_tol, "Slice-product tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mathieu_boundary->add_option("--rk4-steps", mo.rk4_steps, "Fixed integrator steps")
        ->check(CLI::Range(100, 100000000))
        ->capture_default_str();
    mathieu_boundary->add_option("--subdivisions", mo.subdivisions, "Scan grid intervals")
        ->check(CLI::Range(1, 10000000))
        ->capture_default_str();
    add_format(mathieu_boundary, mo.format, mo.output);
    mathieu_boundary->callback([&] { run_mathieu_boundary(mo); });

    SelftestOpts sto;
    auto* selftest_cmd = app.add_subcommand(
        "selftest", "Run the built-in verification suite and print one line per criterion");
    selftest_cmd->add_option("--seed", sto.seed, "Seed for the randomized suites")
        ->capture_default_str();
    add_format(selftest_cmd, sto.format, sto.output, {"text", "json"});
    selftest_cmd->callback([&] { exit_code = run_selftest(sto); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        nlohmann::json err{{"error", {{"kind", "parse"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        nlohmann::json err{{"error", {{"kind", "validation"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        nlohmann::json err{{"error", {{"kind", "numerical"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return exit_code;
}
