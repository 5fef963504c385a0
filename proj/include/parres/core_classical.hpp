#pragma once

#include <complex>
#include <utility>
#include <variant>
#include <vector>

#include <parres/mat2.hpp>

namespace parres::classical {

// Half-width of the marginal band around |tr M|/2 = 1. Floating point
// cannot hit the measure-zero stability boundary exactly, so anything
// inside the band is treated as marginal.
inline constexpr double kDefaultBand = 1e-9;

// Determinant gate for operations that require a symplectic input.
inline constexpr double kDefaultDetTol = 1e-9;

// Kicked oscillator: harmonic motion at frequency omega over a period T,
// interrupted once per period by the squeeze (x, p) -> (e^a x, e^-a p).
// The classification depends only on (omega*T, alpha); m and hbar set
// scales for downstream use.
struct KickedParams {
    double m = 1.0;
    double omega = 1.0;
    double T = 1.0;
    double alpha = 0.0;
    double hbar = 1.0;

    double omega_T() const { return omega * T; }

    // Throws std::invalid_argument on out-of-domain values.
    void validate() const;
};

// One-period map; unit determinant by construction of the factories here.
using Monodromy2 = Mat2;

struct Elliptic {
    double Omega;  // rotation angle per period, in (0,pi) u (pi,2pi)
};

struct Hyperbolic {
    double mu;       // growth exponent per period, > 0
    bool reflected;  // tr M < -2: both eigenvalues negative
};

struct Marginal {
    int sign;       // +1 or -1, the common eigenvalue
    bool shearing;  // M differs from sign*I (nontrivial Jordan block)
};

using StabilityClass = std::variant<Elliptic, Hyperbolic, Marginal>;

enum class Regime { elliptic, hyperbolic, marginal };

Regime regime_of(const StabilityClass& c);

// Coefficients of Q(z) = q_pp p^2 + q_xx x^2 + q_xp x p, the quadratic
// form z^T L M z that M leaves invariant.
struct QuadraticFormCoeffs {
    double q_pp = 0.0;
    double q_xx = 0.0;
    double q_xp = 0.0;

    double eval(const Vec2& z) const {
        return q_pp * z.p * z.p + q_xx * z.x * z.x + q_xp * z.x * z.p;
    }
};

// One root of |cosh a cos wT| = 1, tagged with the sign of the trace on
// that boundary.
struct BoundaryRoot {
    double omega_T;
    int sign;
};

// diag(e^a, e^-a); rejects non-finite a.
Monodromy2 kick_matrix(double alpha);

// Harmonic rotation [[cos wT, sin wT/(m w)], [-m w sin wT, cos wT]];
// the w = 0 limit is the free shear [[1, T/m], [0, 1]].
Monodromy2 free_matrix(double m, double omega, double T);

// Kick first, then free motion: M = M0 * Mk.
Monodromy2 monodromy_kicked(const KickedParams& p);

// (l+, l-) with l+- = tr M/2 +- sqrt((tr M/2)^2 - 1) and l+ l- = 1;
// l+ has nonnegative imaginary part in the complex case. Rejects input
// whose determinant is farther than det_tol from 1.
std::pair<std::complex<double>, std::complex<double>> eigenvalue_pair(
    const Monodromy2& M, double det_tol = kDefaultDetTol);

// Elliptic when |tr M|/2 < 1 - band, hyperbolic when > 1 + band,
// marginal inside the band. The elliptic angle satisfies cos Omega =
// tr M/2 with sign(sin Omega) = sign(M12), so M is conjugate to the
// rotation by +Omega.
StabilityClass classify(const Monodromy2& M, double band = kDefaultBand);

// Coefficients of z^T L M z: (q_pp, q_xx, q_xp) = (-M12, M21, M22 - M11).
QuadraticFormCoeffs quadratic_form(const Monodromy2& M);

// All wT in [0, 2pi) with |cosh a cos wT| = 1, by closed-form arccos.
// Four roots for a != 0; for a = 0 the boundary degenerates to the
// isolated points wT = 0 and pi, which are reported.
std::vector<BoundaryRoot> stability_boundary_kicked(double alpha);

}  // namespace parres::classical
