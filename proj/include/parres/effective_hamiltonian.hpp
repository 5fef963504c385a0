#pragma once

#include <parres/core_classical.hpp>
#include <parres/mat2.hpp>

namespace parres::heff {

// The entangling factor Delta = arcsinh(D)/D evaluated at dsq = D^2,
// together with the dsq it was computed from. Delta is real and positive
// for all dsq > -1, with Delta(0) = 1.
struct DeltaValue {
    double dsq = 0.0;
    double delta = 1.0;
};

// One-period evolution collapsed to a single quadratic Hamiltonian
// H = u p^2 + v x^2 + w (xp + px)/2, whose classical flow over time T is
// exp(G). When reflection_factor is set a -identity factor was split off
// first, so exp(G) reproduces -M instead of M and downstream quasi
// phases gain pi per period.
struct EffectiveGenerator {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    Mat2 G = {0.0, 0.0, 0.0, 0.0};  // traceless by construction
    bool reflection_factor = false;
    DeltaValue delta;       // entangling factor of the split matrix
    double half_trace = 0.0;  // tr M/2 of the original input
    double band = classical::kDefaultBand;
    double T = 1.0;
    double hbar = 1.0;
};

struct RegimeReduction {
    double Omega_sq;  // squared normal-form angle per period; 0 when marginal
    classical::Regime normal_form;
};

struct Proportionality {
    double sigma;     // least-squares constant with Q ~ sigma * H
    double residual;  // relative misfit of the three coefficient pairs
};

namespace detail {
// The two evaluation routes behind delta_of_dsq, exposed so the
// continuity of the switch can be tested on both sides.
double delta_direct(double dsq);
double delta_series(double dsq);
}  // namespace detail

// arcsinh(sqrt(dsq))/sqrt(dsq) for dsq > 0, arcsin(sqrt(-dsq))/sqrt(-dsq)
// for dsq < 0, Taylor series for |dsq| < 1e-4. Rejects dsq <= -1, where
// the principal branch is ambiguous.
double delta_of_dsq(double dsq);

// Builds the effective generator from a one-period map. A -identity
// factor is split off for every negative-trace input (required for
// tr M < -2, where no real traceless generator exists; kept for
// -2 < tr M < 0 so the entangling factor stays on its well-conditioned
// branch). Inside the marginal band the generator is the nilpotent part
// directly; M = -identity yields G = 0 with the reflection recorded.
EffectiveGenerator heff_from_monodromy(const Mat2& M, double T, double hbar,
                                       double band = classical::kDefaultBand);

// Sign-classified squared angle of the normal form (P^2 + Omega^2 X^2)/2:
// positive elliptic, negative hyperbolic, zero marginal. Agrees with
// classical::classify of the generating map by construction.
RegimeReduction regime_reduction(const EffectiveGenerator& gen);

// Fits Q ~ sigma * H over the three coefficient pairs. Throws for
// M = +-identity, where both forms vanish and sigma is indeterminate.
Proportionality quadratic_form_proportionality(
    const EffectiveGenerator& gen, const classical::QuadraticFormCoeffs& Q);

}  // namespace parres::heff
