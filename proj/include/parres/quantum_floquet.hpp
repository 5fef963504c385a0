#pragma once

#include <complex>
#include <string>
#include <vector>

#include <parres/core_classical.hpp>
#include <parres/mat2.hpp>

// Quantum side of the periodically driven oscillator: Gaussian moment
// propagation under the classical monodromy, quasi-energy spectra in the
// stable/marginal regimes, and exact finite-truncation comb eigenstates
// of the squeeze kick.

namespace parres::quantum {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;

// -- Gaussian states ---------------------------------------------------------

// Second moments are stored as a factor F with Sigma = F F^T, and
// det Sigma is tracked multiplicatively alongside. Reconstructing the
// determinant from the propagated entries would cancel catastrophically
// once the variances grow by many e-foldings; the factored form keeps
// both the largest eigenvalue and the invariant determinant accurate.
struct GaussianState {
    Vec2 mean{0.0, 0.0};
    Mat2 cov_factor = Mat2::identity();
    double det_cov = 1.0;
    double hbar = 1.0;

    static GaussianState vacuum(double hbar = 1.0);
    // Covariance entries sigma_xx, sigma_xp, sigma_pp; rejects
    // non-positive-definite input and det Sigma < hbar^2/4.
    static GaussianState from_covariance(Vec2 mean, double sxx, double sxp, double spp,
                                         double hbar = 1.0);

    Mat2 covariance() const;  // symmetric Sigma = F F^T
    double sigma_max_eigenvalue() const;
};

// mean <- M^n mean, Sigma <- M^n Sigma (M^n)^T. Requires det M = 1
// within 1e-9.
GaussianState propagate_gaussian(const GaussianState& state, const Mat2& M, int n_periods);

// Least-squares slope of (1/2) ln lambda_max(Sigma_n) over the last half
// of n = 1..n_max, starting from vacuum; converges to the stability
// exponent mu. Throws std::invalid_argument for non-hyperbolic M.
double variance_growth_exponent(const Mat2& M, int n_max, double hbar = 1.0,
                                double band = classical::kDefaultBand);

// -- quasi-energy spectra ----------------------------------------------------

struct SpectrumClass {
    double value = 0.0;        // quasi energy in [0, 2*pi)
    std::vector<int> members;  // ladder indices n sharing the value
};

struct QuasiEnergySpectrum {
    classical::Regime regime = classical::Regime::elliptic;
    bool rational = false;
    long long r = 0;  // reduced fraction r/s of the winding OmegaT/(2*pi),
    long long s = 0;  // populated when rational
    std::vector<double> eps;            // eps_n for n = 0..n_max
    std::vector<SpectrumClass> classes; // distinct values, ascending
    double max_gap = 0.0;               // largest circular gap between values
    std::string descriptor;
};

// eps_n = OmegaT*(n + 1/2) mod 2*pi. Rationality of OmegaT/(2*pi) is
// detected by continued fractions: a remainder below tol terminates the
// expansion (rational), a convergent denominator beyond denominator_cap
// declares irrational. Rational r/s yields exactly s distinct values,
// computed in integer arithmetic so class membership is exact.
QuasiEnergySpectrum elliptic_spectrum(double OmegaT, int n_max, double tol = 1e-9,
                                      long long denominator_cap = 1000000);

struct MarginalPartners {
    std::vector<double> values;        // +-P_k, k = 0..k_max, in k order
    double max_phase_deviation = 0.0;  // angular spread of exp(-i P^2 T/(2 hbar))
};

// Degenerate momentum partners +-sqrt(P0^2 + (2 hbar/T) 2 pi k) sharing
// one Floquet eigenvalue.
MarginalPartners marginal_partners(double P0, double T, double hbar, int k_max);

// -- resonant comb eigenstates -----------------------------------------------

struct PositionEntry {
    double position = 0.0;
    std::complex<double> amplitude{1.0, 0.0};
};

struct CombEntry {
    int n = 0;
    double position = 0.0;
    std::complex<double> amplitude{0.0, 0.0};
};

// Weighted position comb x_n = e^{-alpha n} x0 with amplitudes
// e^{i mu n} e^{-alpha n/2}/sqrt(2 pi), n in [-half_width, half_width].
// Entries carry explicit ladder indices; kicking shifts the index range.
struct DeltaCombState {
    double x0 = 1.0;
    double mu = 0.0;  // folded into [0, 2*pi)
    double alpha = 1.0;
    int half_width = 0;
    std::vector<CombEntry> entries;
};

// The squeeze kick on a single improper position state:
// (x, a) -> (e^{-alpha} x, e^{-alpha/2} a).
PositionEntry apply_kick_to_positions(const PositionEntry& entry, double alpha);

// Kick a whole comb: positions and amplitudes as above, ladder indices
// shifted by +1 (kick along the comb's own alpha) or -1 (inverse kick);
// any other strength knocks positions off the ladder and throws.
DeltaCombState apply_kick_to_positions(const DeltaCombState& comb, double alpha);

// Builds the 2N+1-entry comb. x0 must lie in the fundamental interval
// [1, e^|alpha|) u [-e^|alpha|, -1); normalize_to_fundamental maps
// arbitrary nonzero x there. alpha != 0, N >= 1.
DeltaCombState build_resonant_eigenstate(double x0, double mu, double alpha, int N);

// The dilation fixed point x = 0, which the ladder never reaches: a
// single entry at the origin.
DeltaCombState zero_position_state(double alpha);

struct NormalizedPosition {
    double x0 = 1.0;  // representative in the fundamental interval
    int n = 0;        // ladder index with x = e^{-alpha n} x0
};

NormalizedPosition normalize_to_fundamental(double x, double alpha);

struct EigenResidual {
    double residual_norm_sq = 0.0;
    int boundary_terms = 0;
    double interior_max_rel = 0.0;         // worst interior cancellation defect
    std::vector<CombEntry> residual_entries;
};

// (F - e^{-i mu}) applied to the comb, paired entry-by-entry at equal
// ladder indices. Interior terms cancel algebraically; what survives are
// the two overhanging boundary entries at indices -N and N+1.
EigenResidual eigen_residual(const DeltaCombState& comb);

// Formal counting overlap: entries pair only at equal ladder indices,
// each pair weighted by e^{alpha n} (the delta-function scaling of the
// geometrically compressed positions). Same labels give the Dirichlet
// kernel in mu' - mu; distinct x0 in one fundamental interval give 0
// exactly. Requires matching alpha and truncation.
std::complex<double> comb_overlap(const DeltaCombState& c1, const DeltaCombState& c2);

// Pairwise overlaps, row-major over the given states.
std::vector<std::complex<double>> overlap_matrix(const std::vector<DeltaCombState>& states);

}  // namespace parres::quantum
