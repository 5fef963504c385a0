#include <parres/core_classical.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace parres::classical {

void KickedParams::validate() const {
    if (!(m > 0.0) || !std::isfinite(m))
        throw std::invalid_argument("KickedParams: m must be positive and finite");
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("KickedParams: T must be positive and finite");
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw std::invalid_argument("KickedParams: hbar must be positive and finite");
    if (!(omega >= 0.0) || !std::isfinite(omega))
        throw std::invalid_argument("KickedParams: omega must be nonnegative and finite");
    if (!std::isfinite(alpha))
        throw std::invalid_argument("KickedParams: alpha must be finite");
}

Regime regime_of(const StabilityClass& c) {
    if (std::holds_alternative<Elliptic>(c)) return Regime::elliptic;
    if (std::holds_alternative<Hyperbolic>(c)) return Regime::hyperbolic;
    return Regime::marginal;
}

Monodromy2 kick_matrix(double alpha) {
    if (!std::isfinite(alpha))
        throw std::invalid_argument("kick_matrix: alpha must be finite");
    return {std::exp(alpha), 0.0, 0.0, std::exp(-alpha)};
}

Monodromy2 free_matrix(double m, double omega, double T) {
    if (!(m > 0.0))
        throw std::invalid_argument("free_matrix: m must be positive");
    if (!(T >= 0.0))
        throw std::invalid_argument("free_matrix: T must be nonnegative");
    if (!(omega >= 0.0))
        throw std::invalid_argument("free_matrix: omega must be nonnegative");
    if (omega == 0.0) return {1.0, T / m, 0.0, 1.0};
    const double wT = omega * T;
    const double c = std::cos(wT);
    const double s = std::sin(wT);
    return {c, s / (m * omega), -m * omega * s, c};
}

Monodromy2 monodromy_kicked(const KickedParams& p) {
    p.validate();
    return free_matrix(p.m, p.omega, p.T) * kick_matrix(p.alpha);
}

std::pair<std::complex<double>, std::complex<double>> eigenvalue_pair(
    const Monodromy2& M, double det_tol) {
    if (std::abs(M.det() - 1.0) > det_tol)
        throw std::invalid_argument(
            "eigenvalue_pair: determinant " + std::to_string(M.det()) +
            " is not 1 within tolerance");
    const double t = 0.5 * M.trace();
    const double disc = t * t - 1.0;
    if (disc < 0.0) {
        const double im = std::sqrt(-disc);
        return {{t, im}, {t, -im}};
    }
    const double root = std::sqrt(disc);
    // The larger-magnitude eigenvalue is computed directly; its partner
    // via the unit product, avoiding cancellation at t near -1 or 1.
    if (t >= 0.0) {
        const double big = t + root;
        return {{big, 0.0}, {1.0 / big, 0.0}};
    }
    const double big = t - root;
    return {{1.0 / big, 0.0}, {big, 0.0}};
}

StabilityClass classify(const Monodromy2& M, double band) {
    if (!(band >= 0.0))
        throw std::invalid_argument("classify: band must be nonnegative");
    const double t = 0.5 * M.trace();
    const double a = std::abs(t);
    if (a < 1.0 - band) {
        double Omega = std::acos(t);
        if (M.m12 < 0.0) Omega = 2.0 * M_PI - Omega;
        return Elliptic{Omega};
    }
    if (a > 1.0 + band) {
        return Hyperbolic{std::acosh(a), t < 0.0};
    }
    const int sign = t >= 0.0 ? 1 : -1;
    const Mat2 ref = sign > 0 ? Mat2::identity() : Mat2::identity().negated();
    return Marginal{sign, max_abs_diff(M, ref) > 1e-12};
}

QuadraticFormCoeffs quadratic_form(const Monodromy2& M) {
    return {-M.m12, M.m21, M.m22 - M.m11};
}

std::vector<BoundaryRoot> stability_boundary_kicked(double alpha) {
    if (!std::isfinite(alpha))
        throw std::invalid_argument("stability_boundary_kicked: alpha must be finite");
    if (alpha == 0.0) {
        // |cos wT| = 1 only at the isolated resonances.
        return {{0.0, 1}, {M_PI, -1}};
    }
    const double r = std::acos(1.0 / std::cosh(alpha));  // in (0, pi/2)
    return {{r, 1},
            {M_PI - r, -1},
            {M_PI + r, -1},
            {2.0 * M_PI - r, 1}};
}

}  // namespace parres::classical
