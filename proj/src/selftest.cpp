#include <parres/selftest.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <parres/chart.hpp>
#include <parres/core_classical.hpp>
#include <parres/effective_hamiltonian.hpp>
#include <parres/frequency_modulation.hpp>
#include <parres/quantum_floquet.hpp>

namespace parres::selftest {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::string fmt(const char* pattern, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, a);
    return buf;
}

std::string fmt2(const char* pattern, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

Mat2 kicked(double wT, double alpha) {
    return classical::free_matrix(1.0, 1.0, wT) * classical::kick_matrix(alpha);
}

// -- criterion 1: random symplecticity --------------------------------

CriterionResult symplectic_suite(std::mt19937_64& rng) {
    double worst_defect = 0.0, worst_det = 0.0;
    for (int i = 0; i < 10000; ++i) {
        classical::KickedParams p;
        p.m = uniform(rng, 0.5, 2.0);
        p.omega = uniform(rng, 0.0, 1.0) < 0.02 ? 0.0 : uniform(rng, 0.2, 3.0);
        p.T = uniform(rng, 0.1, kTwoPi);
        p.alpha = uniform(rng, -2.0, 2.0);
        const Mat2 M = classical::monodromy_kicked(p);
        worst_defect = std::max(worst_defect, symplectic_defect(M));
        worst_det = std::max(worst_det, std::abs(M.det() - 1.0));
    }
    CriterionResult r{1, "symplectic-random-suite",
                      worst_defect < 1e-12 && worst_det < 1e-12,
                      fmt2("worst defect %.3g, worst |det-1| %.3g", worst_defect,
                           worst_det)};
    return r;
}

// -- criterion 2: classification against the trace oracle -------------

CriterionResult classification_grid() {
    int mismatches = 0, skipped = 0, tested = 0;
    for (int j = 0; j < 200; ++j) {
        const double alpha = -2.0 + 4.0 * j / 199.0;
        for (int i = 0; i < 200; ++i) {
            const double wT = kTwoPi * i / 199.0;
            const double margin = std::abs(std::cosh(alpha) * std::cos(wT)) - 1.0;
            if (std::abs(margin) <= 1e-9) {
                ++skipped;
                continue;
            }
            ++tested;
            const auto regime =
                classical::regime_of(classical::classify(kicked(wT, alpha)));
            const bool unstable = regime == classical::Regime::hyperbolic;
            if (unstable != (margin > 0.0)) ++mismatches;
        }
    }
    CriterionResult r{2, "classification-grid-oracle", mismatches == 0, ""};
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d cells tested, %d near-boundary skipped, %d mismatches",
                  tested, skipped, mismatches);
    r.detail = buf;
    return r;
}

// -- criterion 3: generator reconstruction ----------------------------

CriterionResult generator_reconstruction(std::mt19937_64& rng) {
    double worst = 0.0;
    int draws = 0;
    while (draws < 10000) {
        const double alpha = uniform(rng, -2.5, 2.5);
        const double wT = uniform(rng, 1e-3, kTwoPi - 1e-3);
        if (std::abs(std::abs(std::cosh(alpha) * std::cos(wT)) - 1.0) < 1e-8)
            continue;
        ++draws;
        const Mat2 M = kicked(wT, alpha);
        const auto gen = heff::heff_from_monodromy(M, 1.0, 1.0);
        const Mat2 target = gen.reflection_factor ? M.negated() : M;
        worst = std::max(worst, max_abs_diff(exp_traceless(gen.G), target));
    }
    return {3, "generator-reconstruction", worst < 1e-10,
            fmt("worst |exp(G) -+ M| %.3g over 10000 draws", worst)};
}

// -- criterion 4: entangling-factor route continuity ------------------

CriterionResult entangling_continuity() {
    const double plus =
        std::abs(heff::detail::delta_direct(1e-4) - heff::detail::delta_series(1e-4));
    const double minus =
        std::abs(heff::detail::delta_direct(-1e-4) - heff::detail::delta_series(-1e-4));
    const bool unit = heff::delta_of_dsq(0.0) == 1.0;
    return {4, "entangling-factor-continuity",
            plus < 1e-12 && minus < 1e-12 && unit,
            fmt2("route gap %.3g at +1e-4, %.3g at -1e-4", plus, minus)};
}

// -- criterion 5: conserved quadratic form ----------------------------

CriterionResult quadratic_invariant(std::mt19937_64& rng) {
    double worst_drift = 0.0, worst_residual = 0.0;
    auto drift_of = [&](const Mat2& M) {
        const auto Q = classical::quadratic_form(M);
        for (int k = 0; k < 4; ++k) {
            Vec2 z{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
            const double q0 = Q.eval(z);
            if (std::abs(q0) < 1e-2) continue;
            for (int n = 0; n < 50; ++n) {
                z = M * z;
                worst_drift = std::max(worst_drift, std::abs(Q.eval(z) / q0 - 1.0));
            }
        }
    };
    int elliptic_draws = 0;
    while (elliptic_draws < 400) {
        const double alpha = uniform(rng, -1.5, 1.5);
        const double wT = uniform(rng, 1e-2, kTwoPi - 1e-2);
        if (std::abs(std::cosh(alpha) * std::cos(wT)) > 1.0 - 1e-3) continue;
        ++elliptic_draws;
        const Mat2 M = kicked(wT, alpha);
        drift_of(M);
        const auto gen = heff::heff_from_monodromy(M, 1.0, 1.0);
        const auto prop =
            heff::quadratic_form_proportionality(gen, classical::quadratic_form(M));
        worst_residual = std::max(worst_residual, prop.residual);
    }
    drift_of(Mat2{1.0, 2.0, 0.0, 1.0});    // marginal shear, x-translating
    drift_of(Mat2{1.0, 0.0, -0.7, 1.0});   // marginal shear, p-translating
    return {5, "quadratic-invariant",
            worst_drift < 1e-8 && worst_residual < 1e-10,
            fmt2("worst 50-power drift %.3g, worst proportionality residual %.3g",
                 worst_drift, worst_residual)};
}

// -- criterion 6: slice-product convergence and order -----------------

CriterionResult slice_convergence() {
    const freq::Mathieu prof{1.0, 0.5, 2.0};
    const auto conv = freq::monodromy_converged(prof, 1.0, 1e-10);
    const Mat2 oracle = freq::rk4_oracle(prof, 1.0, 40000);
    const double err = max_abs_diff(conv.result, oracle);

    const Mat2 ref = freq::monodromy_slices(prof, 1.0, 8192);
    double e_prev = max_abs_diff(freq::monodromy_slices(prof, 1.0, 64), ref);
    double order_lo = 10.0, order_hi = 0.0;
    for (int N = 128; N <= 512; N *= 2) {
        const double e = max_abs_diff(freq::monodromy_slices(prof, 1.0, N), ref);
        const double order = std::log2(e_prev / e);
        order_lo = std::min(order_lo, order);
        order_hi = std::max(order_hi, order);
        e_prev = e;
    }
    const bool ok = err < 1e-8 && order_lo >= 1.8 && order_hi <= 2.2;
    return {6, "slice-product-convergence", ok,
            fmt2("rk4 gap %.3g, doubling order in [%.3g, 2.2]", err, order_lo) +
                fmt(" .. [1.8, %.3g]", order_hi)};
}

// -- criterion 7: boundary location by two methods --------------------

CriterionResult boundary_dual() {
    const auto kicked_family = [](double wT) { return kicked(wT, 0.8); };
    const auto roots = freq::trace_boundary(kicked_family, 0.1, 1.5, 1e-12);
    const double closed = std::acos(1.0 / std::cosh(0.8));
    double kicked_gap = 1e9;
    for (const auto& root : roots)
        kicked_gap = std::min(kicked_gap, std::abs(root.param - closed));

    const auto slice_family = [](double l) {
        return freq::monodromy_converged(freq::Mathieu{l, 0.4, 2.0}, 1.0, 1e-10)
            .result;
    };
    const auto rk4_family = [](double l) {
        return freq::rk4_oracle(freq::Mathieu{l, 0.4, 2.0}, 1.0, 6000);
    };
    const auto rs = freq::trace_boundary(slice_family, 0.6, 0.9, 1e-9);
    const auto rr = freq::trace_boundary(rk4_family, 0.6, 0.9, 1e-9);
    double mathieu_gap = 1e9;
    if (rs.size() == rr.size())
        for (size_t i = 0; i < rs.size(); ++i)
            mathieu_gap = std::min(mathieu_gap, std::abs(rs[i].param - rr[i].param));
    const bool ok = kicked_gap < 1e-9 && mathieu_gap < 1e-6;
    return {7, "boundary-dual-method", ok,
            fmt2("kicked closed-form gap %.3g, slices-vs-rk4 gap %.3g", kicked_gap,
                 mathieu_gap)};
}

// -- criterion 8: variance growth and determinant survival ------------

CriterionResult variance_growth() {
    double worst_rel = 0.0;
    const struct {
        double wT, alpha;
    } cases[] = {{kTwoPi, 1.0}, {kTwoPi, 0.5}, {0.8, 1.2}};
    for (const auto& c : cases) {
        const Mat2 M = kicked(c.wT, c.alpha);
        const auto cls = classical::classify(M);
        const double mu = std::get<classical::Hyperbolic>(cls).mu;
        const double fitted = quantum::variance_growth_exponent(M, 24);
        worst_rel = std::max(worst_rel, std::abs(fitted / mu - 1.0));
    }
    double worst_drift = 0.0;
    const Mat2 regimes[] = {kicked(1.2, 1.2), classical::free_matrix(1.0, 0.0, 2.0),
                            kicked(kTwoPi, 1.0)};
    for (const Mat2& M : regimes) {
        const auto out = quantum::propagate_gaussian(quantum::GaussianState::vacuum(), M, 50);
        worst_drift = std::max(worst_drift, std::abs(out.det_cov / 0.25 - 1.0));
    }
    return {8, "variance-growth-exponents",
            worst_rel < 0.01 && worst_drift < 1e-10,
            fmt2("worst exponent misfit %.3g, worst det drift %.3g", worst_rel,
                 worst_drift)};
}

// -- criterion 9: comb eigenstate residual and overlaps ---------------

CriterionResult comb_eigenstate() {
    const double mu = 2.137;
    double worst_interior = 0.0, worst_modulus = 0.0, worst_overlap = 0.0;
    bool structure_ok = true;
    for (const double alpha : {0.3, 1.0, 2.0}) {
        for (const int N : {5, 20}) {
            const auto comb = quantum::build_resonant_eigenstate(1.0, mu, alpha, N);
            const auto res = quantum::eigen_residual(comb);
            worst_interior = std::max(worst_interior, res.interior_max_rel);
            structure_ok = structure_ok && res.boundary_terms == 2 &&
                           res.residual_entries.size() == 2;
            const double lo_want =
                std::exp(0.5 * alpha * N) * quantum::kInvSqrt2Pi;
            const double hi_want =
                std::exp(-0.5 * alpha * (N + 1)) * quantum::kInvSqrt2Pi;
            const double lo = std::abs(res.residual_entries.front().amplitude);
            const double hi = std::abs(res.residual_entries.back().amplitude);
            worst_modulus = std::max(worst_modulus,
                                     std::abs(lo / lo_want - 1.0));
            worst_modulus = std::max(worst_modulus,
                                     std::abs(hi / hi_want - 1.0));

            const auto shifted = quantum::build_resonant_eigenstate(1.2, mu, alpha, N);
            const auto zero = quantum::comb_overlap(comb, shifted);
            structure_ok = structure_ok && zero == std::complex<double>(0.0, 0.0);

            const auto other = quantum::build_resonant_eigenstate(1.0, 0.9, alpha, N);
            const double dmu = 0.9 - mu;
            const std::complex<double> dirichlet(
                std::sin((2.0 * N + 1.0) * 0.5 * dmu) /
                    (kTwoPi * std::sin(0.5 * dmu)),
                0.0);
            worst_overlap = std::max(
                worst_overlap, std::abs(quantum::comb_overlap(comb, other) - dirichlet));
        }
    }
    const bool ok = worst_interior <= 1e-15 && structure_ok &&
                    worst_modulus < 1e-12 && worst_overlap < 1e-12;
    return {9, "comb-eigenstate-residual", ok,
            fmt2("interior defect %.3g, boundary modulus misfit %.3g", worst_interior,
                 worst_modulus) +
                fmt(", overlap misfit %.3g", worst_overlap)};
}

// -- criterion 10: quasi-energy spectrum structure --------------------

CriterionResult spectrum_structure() {
    bool ok = true;
    std::string note;
    const struct {
        long long r, s;
        int n_max;
    } cases[] = {{1, 3, 8}, {2, 5, 9}};
    for (const auto& c : cases) {
        const auto spec =
            quantum::elliptic_spectrum(kTwoPi * static_cast<double>(c.r) /
                                           static_cast<double>(c.s),
                                       c.n_max);
        ok = ok && spec.rational && spec.r == c.r && spec.s == c.s;
        ok = ok && static_cast<long long>(spec.classes.size()) == c.s;
        std::set<int> seen;
        for (const auto& cls : spec.classes) {
            ok = ok && !cls.members.empty();
            const int rem = cls.members.front() % static_cast<int>(c.s);
            for (const int n : cls.members) {
                ok = ok && n % static_cast<int>(c.s) == rem;
                seen.insert(n);
            }
        }
        ok = ok && static_cast<int>(seen.size()) == c.n_max + 1;
    }
    const auto partners = quantum::marginal_partners(0.7, 1.3, 0.5, 6);
    ok = ok && partners.max_phase_deviation < 1e-12 && partners.values.size() == 14;
    return {10, "spectrum-structure", ok,
            fmt("class counts match r/s cases, partner phase spread %.3g",
                partners.max_phase_deviation)};
}

// -- criterion 11: byte-identical renders -----------------------------

CriterionResult determinism(std::uint64_t seed) {
    chart::SweepSpec spec;
    spec.family = chart::Family::kicked;
    spec.axis1 = {"omega_T", 0.2, 6.2, 21};
    spec.axis2 = {"alpha", -1.0, 1.0, 21};
    const std::string csv1 = chart::to_csv(chart::sweep(spec));
    const std::string csv2 = chart::to_csv(chart::sweep(spec));
    const std::string b1 = chart::boundaries_to_csv(chart::tongue_boundaries(spec, 1e-10));
    const std::string b2 = chart::boundaries_to_csv(chart::tongue_boundaries(spec, 1e-10));

    auto sample = [&](std::uint64_t s) {
        std::mt19937_64 rng(s);
        std::string acc;
        for (int i = 0; i < 200; ++i) {
            const Mat2 M = kicked(uniform(rng, 0.1, 6.2), uniform(rng, -2.0, 2.0));
            acc += fmt2("%.17g %.17g;", M.trace(), symplectic_defect(M));
        }
        return acc;
    };
    const bool ok = csv1 == csv2 && b1 == b2 && sample(seed) == sample(seed);
    return {11, "output-determinism", ok,
            std::string("chart csv, boundary csv, and seeded draws ") +
                (ok ? "repeat byte-identically" : "diverge between runs")};
}

}  // namespace

std::vector<CriterionResult> run_all(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CriterionResult> out;
    out.push_back(symplectic_suite(rng));
    out.push_back(classification_grid());
    out.push_back(generator_reconstruction(rng));
    out.push_back(entangling_continuity());
    out.push_back(quadratic_invariant(rng));
    out.push_back(slice_convergence());
    out.push_back(boundary_dual());
    out.push_back(variance_growth());
    out.push_back(comb_eigenstate());
    out.push_back(spectrum_structure());
    out.push_back(determinism(seed));
    return out;
}

std::string report(const std::vector<CriterionResult>& results) {
    std::string out;
    for (const auto& r : results) {
        char head[64];
        std::snprintf(head, sizeof(head), "criterion %02d %s: ", r.id, r.name.c_str());
        out += head;
        out += r.passed ? "PASS" : "FAIL";
        out += " (";
        out += r.detail;
        out += ")\n";
    }
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return !results.empty();
}

}  // namespace parres::selftest
