#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include <parres/core_classical.hpp>
#include <parres/quantum_floquet.hpp>

using namespace parres;
using namespace parres::quantum;

namespace {

Mat2 kicked(double omega_T, double alpha) {
    return classical::monodromy_kicked({1.0, 1.0, omega_T, alpha, 1.0});
}

// Conserved-ellipse condition number: for elliptic M the quadratic
// invariant is definite, and its eigenvalue ratio bounds ||M^n||^2.
double ellipse_condition(const Mat2& M) {
    auto q = classical::quadratic_form(M);
    double qxx = q.q_xx, qpp = q.q_pp, qxp = q.q_xp;
    if (qxx + qpp < 0.0) {
        qxx = -qxx;
        qpp = -qpp;
        qxp = -qxp;
    }
    const double t = 0.5 * (qxx + qpp);
    const double d = qxx * qpp - 0.25 * qxp * qxp;
    const double root = std::sqrt(t * t - d);
    return (t + root) / (t - root);
}

}  // namespace

TEST_CASE("gaussian states carry their covariance faithfully") {
    const GaussianState v = GaussianState::vacuum(1.0);
    CHECK(v.covariance().m11 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.covariance().m22 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.covariance().m12 == 0.0);
    CHECK(v.det_cov == 0.25);
    CHECK(v.sigma_max_eigenvalue() == doctest::Approx(0.5).epsilon(1e-15));

    const GaussianState s = GaussianState::from_covariance({0.3, -0.1}, 0.9, 0.2, 0.4, 1.0);
    const Mat2 c = s.covariance();
    CHECK(c.m11 == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(c.m12 == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(c.m21 == c.m12);
    CHECK(c.m22 == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s.det_cov == doctest::Approx(0.32).epsilon(1e-15));

    // Uncertainty floor det Sigma >= hbar^2/4 and shape validation.
    CHECK_NOTHROW(GaussianState::from_covariance({0, 0}, 0.5, 0.0, 0.5, 1.0));
    CHECK_THROWS_AS(GaussianState::from_covariance({0, 0}, 0.4, 0.0, 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(GaussianState::from_covariance({0, 0}, 0.5, 0.3, 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(GaussianState::from_covariance({0, 0}, -1.0, 0.0, 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(GaussianState::vacuum(0.0), std::invalid_argument);
    // A tighter hbar raises the floor past the same covariance.
    CHECK_THROWS_AS(GaussianState::from_covariance({0, 0}, 0.5, 0.0, 0.5, 2.0),
                    std::invalid_argument);
}

TEST_CASE("propagation composes the classical map on both moments") {
    const GaussianState s = GaussianState::from_covariance({1.0, 0.0}, 0.9, 0.2, 0.4, 1.0);
    const GaussianState same = propagate_gaussian(s, Mat2::identity(), 7);
    CHECK(same.mean.x == s.mean.x);
    CHECK(same.mean.p == s.mean.p);
    CHECK(max_abs_diff(same.covariance(), s.covariance()) == 0.0);
    CHECK(same.det_cov == s.det_cov);

    // A pure rotation leaves the isotropic vacuum invariant and turns
    // the mean.
    const Mat2 R = classical::free_matrix(1.0, 1.0, 0.9);
    GaussianState rot = GaussianState::vacuum(1.0);
    rot.mean = {1.0, 0.0};
    const GaussianState after = propagate_gaussian(rot, R, 1);
    CHECK(after.mean.x == doctest::Approx(std::cos(0.9)).epsilon(1e-15));
    CHECK(after.mean.p == doctest::Approx(-std::sin(0.9)).epsilon(1e-15));
    CHECK(max_abs_diff(after.covariance(), rot.covariance()) < 1e-15);

    CHECK_THROWS_AS(propagate_gaussian(s, {2.0, 0.0, 0.0, 1.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(propagate_gaussian(s, R, -1), std::invalid_argument);
}

TEST_CASE("hyperbolic propagation doubles the exponent in the variance") {
    // M = diag(e, 1/e): ln lambda_max grows by exactly 2 per period.
    const Mat2 M = kicked(2.0 * M_PI, 1.0);
    GaussianState s = GaussianState::vacuum(1.0);
    std::vector<double> lny;
    for (int n = 1; n <= 20; ++n) {
        s = propagate_gaussian(s, M, 1);
        lny.push_back(std::log(s.sigma_max_eigenvalue()));
    }
    double num = 0.0, den = 0.0;
    const double nbar = 0.5 * (10 + 20), ybar = [&] {
        double acc = 0.0;
        for (int n = 10; n <= 20; ++n) acc += lny[n - 1];
        return acc / 11.0;
    }();
    for (int n = 10; n <= 20; ++n) {
        num += (n - nbar) * (lny[n - 1] - ybar);
        den += (n - nbar) * (n - nbar);
    }
    const double slope = num / den;
    CHECK(slope > 1.98);
    CHECK(slope < 2.02);
}

TEST_CASE("determinant of the covariance survives every regime") {
    const Mat2 hyper = kicked(2.0 * M_PI, 1.0);
    const Mat2 ellip = kicked(1.2, 0.3);
    const Mat2 margin = kicked(0.4803810791337292, 0.5);
    for (const Mat2& M : {hyper, ellip, margin}) {
        const GaussianState end = propagate_gaussian(GaussianState::vacuum(1.0), M, 50);
        CHECK(std::abs(end.det_cov - 0.25) < 1e-10);
    }
    // Where the entries stay moderate the explicit determinant agrees
    // too, which keeps the tracked value honest.
    const GaussianState e50 = propagate_gaussian(GaussianState::vacuum(1.0), ellip, 50);
    CHECK(std::abs(e50.covariance().det() - 0.25) < 1e-12);
    const GaussianState m50 = propagate_gaussian(GaussianState::vacuum(1.0), margin, 50);
    CHECK(std::abs(m50.covariance().det() - 0.25) < 1e-8);
}

TEST_CASE("elliptic propagation stays inside the conserved-ellipse bound") {
    const Mat2 M = kicked(1.2, 0.3);
    const double bound = 0.5 * ellipse_condition(M) * (1.0 + 1e-9);
    GaussianState s = GaussianState::vacuum(1.0);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        s = propagate_gaussian(s, M, 1);
        worst = std::max(worst, s.sigma_max_eigenvalue());
    }
    CHECK(worst <= bound);
    CHECK(worst > 0.5);  // the bound is doing real work: squeezing happens
}

TEST_CASE("variance growth exponent recovers the classification") {
    CHECK(variance_growth_exponent(kicked(2.0 * M_PI, 1.0), 30) ==
          doctest::Approx(1.0).epsilon(0.01));
    CHECK(variance_growth_exponent(kicked(2.0 * M_PI, 0.5), 30) ==
          doctest::Approx(0.5).epsilon(0.01));
    // Generic hyperbolic point: exponent equals arccosh(|Tr|/2).
    CHECK(variance_growth_exponent(kicked(0.8, 1.2), 30) ==
          doctest::Approx(0.7082835177724132).epsilon(0.01));
    // Reflected hyperbolic: the sign flip does not touch the variances.
    CHECK(variance_growth_exponent(kicked(M_PI, 1.0), 30) ==
          doctest::Approx(1.0).epsilon(0.01));

    CHECK_THROWS_AS(variance_growth_exponent(kicked(1.2, 0.3), 30), std::invalid_argument);
    CHECK_THROWS_AS(variance_growth_exponent(Mat2::identity(), 30), std::invalid_argument);
    CHECK_THROWS_AS(variance_growth_exponent(kicked(2.0 * M_PI, 1.0), 2),
                    std::invalid_argument);
}

TEST_CASE("rational winding collapses the spectrum onto s classes") {
    const auto spec = elliptic_spectrum(2.0 * M_PI / 3.0, 8);
    CHECK(spec.regime == classical::Regime::elliptic);
    CHECK(spec.rational);
    CHECK(spec.r == 1);
    CHECK(spec.s == 3);
    REQUIRE(spec.eps.size() == 9);
    CHECK(spec.eps[0] == 1.0471975511965976);   // pi/3, integer-exact snap
    CHECK(spec.eps[1] == M_PI);
    CHECK(spec.eps[2] == 5.235987755982989);    // 5*pi/3
    CHECK(spec.eps[3] == spec.eps[0]);
    REQUIRE(spec.classes.size() == 3);
    CHECK(spec.classes[0].members == std::vector<int>{0, 3, 6});
    CHECK(spec.classes[1].members == std::vector<int>{1, 4, 7});
    CHECK(spec.classes[2].members == std::vector<int>{2, 5, 8});
    CHECK(spec.max_gap == doctest::Approx(2.0 * M_PI / 3.0).epsilon(1e-14));

    // Full turn: every rung lands on pi.
    const auto full = elliptic_spectrum(2.0 * M_PI, 5);
    CHECK(full.rational);
    CHECK(full.s == 1);
    REQUIRE(full.classes.size() == 1);
    CHECK(full.classes[0].value == M_PI);
    CHECK(full.classes[0].members.size() == 6);
    CHECK(full.max_gap == 2.0 * M_PI);

    const auto two_five = elliptic_spectrum(2.0 * M_PI * 2.0 / 5.0, 14);
    CHECK(two_five.rational);
    CHECK(two_five.r == 2);
    CHECK(two_five.s == 5);
    CHECK(two_five.classes.size() == 5);
    for (const auto& cls : two_five.classes) CHECK(cls.members.size() == 3);
}

TEST_CASE("irrational winding fills the circle ever more densely") {
    const double golden = 1.618033988749895;
    const auto spec = elliptic_spectrum(2.0 * M_PI * golden, 100);
    CHECK_FALSE(spec.rational);
    CHECK(spec.classes.size() == 101);  // all distinct at finite truncation
    for (double e : spec.eps) {
        CHECK(e >= 0.0);
        CHECK(e < 2.0 * M_PI);
    }
    double prev_gap = elliptic_spectrum(2.0 * M_PI * golden, 50).max_gap;
    for (int n_max : {100, 200, 400}) {
        const double gap = elliptic_spectrum(2.0 * M_PI * golden, n_max).max_gap;
        CHECK(gap <= prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < elliptic_spectrum(2.0 * M_PI * golden, 50).max_gap / 4.0);
}

TEST_CASE("rationality detection respects its tolerance and cap") {
    // Slightly detuned 1/3: coarse tolerance snaps to the fraction,
    // fine tolerance pushes the denominator past the cap instead.
    const double detuned = 2.0 * M_PI * (1.0 / 3.0 + 1e-12);
    const auto coarse = elliptic_spectrum(detuned, 10, 1e-9);
    CHECK(coarse.rational);
    CHECK(coarse.r == 1);
    CHECK(coarse.s == 3);
    const auto fine = elliptic_spectrum(detuned, 10, 1e-14);
    CHECK_FALSE(fine.rational);

    CHECK_THROWS_AS(elliptic_spectrum(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(elliptic_spectrum(-1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(elliptic_spectrum(1.0, -1), std::invalid_argument);
    CHECK_THROWS_AS(elliptic_spectrum(1.0, 10, 0.0), std::invalid_argument);
}

TEST_CASE("marginal partners share one Floquet phase") {
    const auto p = marginal_partners(0.0, 2.0 * M_PI, 1.0, 1);
    REQUIRE(p.values.size() == 4);
    CHECK(p.values[0] == 0.0);
    CHECK(p.values[1] == -0.0);
    CHECK(p.values[2] == doctest::Approx(1.4142135623730951).epsilon(1e-15));
    CHECK(p.values[3] == doctest::Approx(-1.4142135623730951).epsilon(1e-15));
    CHECK(p.max_phase_deviation < 1e-12);

    const auto q = marginal_partners(0.7, 1.3, 0.5, 6);
    CHECK(q.values.size() == 14);
    CHECK(q.values[0] == 0.7);
    CHECK(q.values[1] == -0.7);
    for (std::size_t i = 2; i < q.values.size(); i += 2) {
        CHECK(std::abs(q.values[i]) > std::abs(q.values[i - 2]));
    }
    CHECK(q.max_phase_deviation < 1e-12);

    CHECK_THROWS_AS(marginal_partners(0.0, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(marginal_partners(0.0, 1.0, 1.0, -1), std::invalid_argument);
}

TEST_CASE("the squeeze kick dilates single position states") {
    const PositionEntry e = apply_kick_to_positions(PositionEntry{1.0, {1.0, 0.0}}, 1.0);
    CHECK(e.position == doctest::Approx(0.36787944117144233).epsilon(1e-16));
    CHECK(e.amplitude.real() == doctest::Approx(0.6065306597126334).epsilon(1e-16));
    CHECK(e.amplitude.imag() == 0.0);

    const PositionEntry id = apply_kick_to_positions(PositionEntry{0.8, {0.2, 0.1}}, 0.0);
    CHECK(id.position == 0.8);
    CHECK(id.amplitude == std::complex<double>{0.2, 0.1});

    // Kick and inverse kick cancel to rounding.
    const PositionEntry fwd = apply_kick_to_positions(PositionEntry{1.7, {0.4, -0.3}}, 0.9);
    const PositionEntry back = apply_kick_to_positions(fwd, -0.9);
    CHECK(back.position == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(back.amplitude.real() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(back.amplitude.imag() == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("resonant combs follow the geometric ladder") {
    const DeltaCombState c = build_resonant_eigenstate(1.0, 0.0, 1.0, 1);
    REQUIRE(c.entries.size() == 3);
    CHECK(c.entries[0].n == -1);
    CHECK(c.entries[0].position == doctest::Approx(2.718281828459045).epsilon(1e-16));
    CHECK(c.entries[1].position == 1.0);
    CHECK(c.entries[2].position == doctest::Approx(0.36787944117144233).epsilon(1e-16));
    const double inv = 0.3989422804014327;  // 1/sqrt(2*pi)
    CHECK(c.entries[0].amplitude.real() ==
          doctest::Approx(1.6487212707001282 * inv).epsilon(1e-15));
    CHECK(c.entries[1].amplitude.real() == doctest::Approx(inv).epsilon(1e-14));
    CHECK(c.entries[2].amplitude.real() ==
          doctest::Approx(0.6065306597126334 * inv).epsilon(1e-14));
    for (const auto& e : c.entries) CHECK(e.amplitude.imag() == 0.0);

    // Positions strictly decrease along the ladder for alpha > 0 ...
    const DeltaCombState big = build_resonant_eigenstate(1.3, 2.1, 0.7, 12);
    for (std::size_t i = 1; i < big.entries.size(); ++i) {
        CHECK(big.entries[i].position < big.entries[i - 1].position);
        CHECK(std::abs(big.entries[i].position) > 0.0);
    }
    // ... and strictly increase for alpha < 0 (inverted ladder).
    const DeltaCombState inv_ladder = build_resonant_eigenstate(1.2, 0.4, -1.0, 4);
    for (std::size_t i = 1; i < inv_ladder.entries.size(); ++i) {
        CHECK(inv_ladder.entries[i].position > inv_ladder.entries[i - 1].position);
    }
    // Quasi phase folds modulo 2*pi.
    const DeltaCombState f1 = build_resonant_eigenstate(1.0, 0.5, 1.0, 3);
    const DeltaCombState f2 = build_resonant_eigenstate(1.0, 0.5 + 2.0 * M_PI, 1.0, 3);
    CHECK(f1.mu == doctest::Approx(f2.mu).epsilon(1e-13));
    for (std::size_t i = 0; i < f1.entries.size(); ++i) {
        CHECK(std::abs(f1.entries[i].amplitude - f2.entries[i].amplitude) < 1e-13);
    }
}

TEST_CASE("comb construction polices the fundamental interval") {
    CHECK_NOTHROW(build_resonant_eigenstate(1.0, 0.0, 1.0, 1));
    CHECK_NOTHROW(build_resonant_eigenstate(-2.718281828459045, 0.0, 1.0, 1));
    CHECK_THROWS_AS(build_resonant_eigenstate(0.5, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_resonant_eigenstate(2.718281828459045, 0.0, 1.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_resonant_eigenstate(-1.0, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_resonant_eigenstate(-3.0, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_resonant_eigenstate(1.0, 0.0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_resonant_eigenstate(1.0, 0.0, 1.0, 0), std::invalid_argument);
    // The rejection points at the normalization helper.
    try {
        build_resonant_eigenstate(5.0, 0.0, 1.0, 2);
        FAIL("expected a rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("normalize_to_fundamental") != std::string::npos);
    }
}

TEST_CASE("positions fold onto their ladder representative") {
    const auto n5 = normalize_to_fundamental(5.0, 1.0);
    CHECK(n5.x0 >= 1.0);
    CHECK(n5.x0 < 2.718281828459045);
    CHECK(std::exp(-1.0 * n5.n) * n5.x0 == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(n5.n == -1);

    const auto nm = normalize_to_fundamental(-1.0, 1.0);
    CHECK(nm.x0 == doctest::Approx(-2.718281828459045).epsilon(1e-15));
    CHECK(nm.n == 1);

    const auto nin = normalize_to_fundamental(1.0, 0.5);
    CHECK(nin.x0 == 1.0);
    CHECK(nin.n == 0);

    // Edge seams stay inside the half-open interval after rounding.
    for (double x : {std::exp(1.0) * std::exp(-1.0), 1.0 / std::exp(1.0), 0.1, 873.2}) {
        const auto r = normalize_to_fundamental(x, 1.0);
        CHECK(r.x0 >= 1.0);
        CHECK(r.x0 < 2.718281828459045);
        CHECK(std::exp(-1.0 * r.n) * r.x0 == doctest::Approx(x).epsilon(1e-12));
    }
    for (double x : {-0.3, -1.0, -2.7182818284590451, -41.7}) {
        const auto r = normalize_to_fundamental(x, 0.8);
        CHECK(r.x0 >= -std::exp(0.8));
        CHECK(r.x0 < -1.0);
        CHECK(std::exp(-0.8 * r.n) * r.x0 == doctest::Approx(x).epsilon(1e-12));
    }
    // Inverted ladder: the representative is the same, the index flips.
    const auto fwd = normalize_to_fundamental(5.0, 1.0);
    const auto rev = normalize_to_fundamental(5.0, -1.0);
    CHECK(fwd.x0 == doctest::Approx(rev.x0).epsilon(1e-14));
    CHECK(rev.n == -fwd.n);
    CHECK(std::exp(1.0 * rev.n) * rev.x0 == doctest::Approx(5.0).epsilon(1e-13));

    CHECK_THROWS_AS(normalize_to_fundamental(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(normalize_to_fundamental(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(normalize_to_fundamental(1e300, 1e-10), std::invalid_argument);
}

TEST_CASE("kicking a comb shifts the ladder index by one") {
    const DeltaCombState c = build_resonant_eigenstate(1.2, 0.7, 0.6, 4);
    const DeltaCombState k = apply_kick_to_positions(c, 0.6);
    REQUIRE(k.entries.size() == c.entries.size());
    for (std::size_t i = 0; i < k.entries.size(); ++i) {
        CHECK(k.entries[i].n == c.entries[i].n + 1);
        CHECK(k.entries[i].position ==
              doctest::Approx(std::exp(-0.6) * c.entries[i].position).epsilon(1e-15));
    }
    // Inverse kick walks back down and restores the comb.
    const DeltaCombState back = apply_kick_to_positions(k, -0.6);
    for (std::size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].n == c.entries[i].n);
        CHECK(back.entries[i].position ==
              doctest::Approx(c.entries[i].position).epsilon(1e-14));
        CHECK(std::abs(back.entries[i].amplitude - c.entries[i].amplitude) < 1e-14);
    }
    CHECK_THROWS_AS(apply_kick_to_positions(c, 0.5), std::invalid_argument);

    // 2N+1 kicks carry the lowest rung's position to the rung just past
    // the top: the geometric ladder closes.
    DeltaCombState walk = build_resonant_eigenstate(1.3, 0.0, 0.7, 3);
    const double start = walk.entries.front().position;  // n = -3
    DeltaCombState moved = walk;
    for (int i = 0; i < 7; ++i) moved = apply_kick_to_positions(moved, 0.7);
    CHECK(moved.entries.front().n == 4);
    CHECK(moved.entries.front().position ==
          doctest::Approx(std::exp(-0.7 * 4) * 1.3).epsilon(1e-13));
    CHECK(moved.entries.front().position ==
          doctest::Approx(std::exp(-0.7 * 7) * start).epsilon(1e-13));
}

TEST_CASE("the origin is a fixed point of the kick") {
    const DeltaCombState z = zero_position_state(0.8);
    REQUIRE(z.entries.size() == 1);
    CHECK(z.entries[0].position == 0.0);
    CHECK(z.entries[0].amplitude.real() == doctest::Approx(0.3989422804014327).epsilon(1e-16));
    const DeltaCombState kz = apply_kick_to_positions(z, 0.8);
    CHECK(kz.entries[0].position == 0.0);
    CHECK(std::abs(kz.entries[0].amplitude) ==
          doctest::Approx(std::exp(-0.4) * 0.3989422804014327).epsilon(1e-15));
    CHECK_THROWS_AS(eigen_residual(z), std::invalid_argument);
}

TEST_CASE("eigen residual is exactly the two boundary overhangs") {
    const DeltaCombState c = build_resonant_eigenstate(1.0, 1.234, 1.0, 10);
    const EigenResidual r = eigen_residual(c);
    CHECK(r.boundary_terms == 2);
    REQUIRE(r.residual_entries.size() == 2);
    CHECK(r.residual_entries[0].n == -10);
    CHECK(r.residual_entries[1].n == 11);
    CHECK(std::abs(r.residual_entries[0].amplitude) ==
          doctest::Approx(59.20828413396256).epsilon(1e-12));       // e^5 / sqrt(2 pi)
    CHECK(std::abs(r.residual_entries[1].amplitude) ==
          doctest::Approx(0.0016303859171402982).epsilon(1e-12));   // e^{-5.5} / sqrt(2 pi)
    const double want = std::norm(r.residual_entries[0].amplitude) +
                        std::norm(r.residual_entries[1].amplitude);
    CHECK(r.residual_norm_sq == want);
    CHECK(r.interior_max_rel < 1e-15);

    // Interior cancellation is machine-exact across strengths and sizes.
    for (double alpha : {0.3, -0.9, 2.0}) {
        for (int N : {1, 5, 20}) {
            const DeltaCombState cc = build_resonant_eigenstate(1.05, 2.137, alpha, N);
            const EigenResidual rr = eigen_residual(cc);
            CHECK(rr.boundary_terms == 2);
            CHECK(rr.interior_max_rel < 1e-15);
            CHECK(rr.residual_norm_sq > 0.0);
        }
    }
}

TEST_CASE("comb overlaps reproduce the Dirichlet kernel") {
    const int N = 10;
    const DeltaCombState a = build_resonant_eigenstate(1.0, 0.0, 1.0, N);
    const DeltaCombState b = build_resonant_eigenstate(1.0, 0.0, 1.0, N);
    const auto same = comb_overlap(a, b);
    CHECK(same.real() == doctest::Approx(3.3422538049298023).epsilon(1e-14));  // 21/(2 pi)
    CHECK(std::abs(same.imag()) < 1e-15);

    // Dirichlet zero at the first lattice offset.
    const double dz = 2.0 * M_PI / (2.0 * N + 1.0);
    const auto zero = comb_overlap(a, build_resonant_eigenstate(1.0, dz, 1.0, N));
    CHECK(std::abs(zero) < 1e-12);

    // Generic offset against the closed-form kernel.
    const double dmu = 0.7;
    const auto gen = comb_overlap(a, build_resonant_eigenstate(1.0, dmu, 1.0, N));
    const double kernel =
        std::sin((2.0 * N + 1.0) * dmu / 2.0) / std::sin(dmu / 2.0) / (2.0 * M_PI);
    CHECK(gen.real() == doctest::Approx(kernel).epsilon(1e-12));
    CHECK(std::abs(gen.imag()) < 1e-13);

    // The kernel depends on the label offset only, not on alpha.
    const auto k1 = comb_overlap(build_resonant_eigenstate(1.0, 0.0, 0.5, N),
                                 build_resonant_eigenstate(1.0, 0.9, 0.5, N));
    const auto k2 = comb_overlap(build_resonant_eigenstate(1.0, 0.0, 2.0, N),
                                 build_resonant_eigenstate(1.0, 0.9, 2.0, N));
    CHECK(std::abs(std::abs(k1) - std::abs(k2)) < 1e-12);

    // Distinct representatives never share a position: exactly zero.
    const auto off = comb_overlap(a, build_resonant_eigenstate(1.5, 0.0, 1.0, N));
    CHECK(off.real() == 0.0);
    CHECK(off.imag() == 0.0);

    CHECK_THROWS_AS(comb_overlap(a, build_resonant_eigenstate(1.0, 0.0, 0.9, N)),
                    std::invalid_argument);
    CHECK_THROWS_AS(comb_overlap(a, build_resonant_eigenstate(1.0, 0.0, 1.0, N + 1)),
                    std::invalid_argument);
}

TEST_CASE("overlap matrices are diagonal-dominant on a label grid") {
    const int N = 8;
    std::vector<DeltaCombState> states;
    for (double x0 : {1.0, 1.4}) {
        for (int k = 0; k < 3; ++k) {
            states.push_back(
                build_resonant_eigenstate(x0, 2.0 * M_PI * k / (2.0 * N + 1.0), 0.9, N));
        }
    }
    const auto mat = overlap_matrix(states);
    const std::size_t K = states.size();
    REQUIRE(mat.size() == K * K);
    const double diag = (2.0 * N + 1.0) / (2.0 * M_PI);
    for (std::size_t i = 0; i < K; ++i) {
        CHECK(mat[i * K + i].real() == doctest::Approx(diag).epsilon(1e-13));
        for (std::size_t j = 0; j < K; ++j) {
            if (i == j) continue;
            // Lattice-offset phases or distinct labels: all vanish.
            CHECK(std::abs(mat[i * K + j]) < 1e-12);
        }
    }
}
