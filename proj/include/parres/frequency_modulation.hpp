#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <parres/mat2.hpp>

// Periodic frequency profiles omega^2(t) and slice-product monodromy
// construction for x'' + omega^2(t) x = 0, plus an independent
// integration oracle and trace-boundary tracing.

namespace parres::freq {

// -- profiles ---------------------------------------------------------------

struct Constant {
    double omega_sq = 1.0;
    double period = 1.0;
};

// omega^2(t) = l - delta_l * cos(omega0 * t); period 2*pi/omega0.
// Negative dips (inverted pendulum) are allowed and only warned about.
struct Mathieu {
    double l = 1.0;
    double delta_l = 0.0;
    double omega0 = 2.0;
};

// omega_sq_high on [0, duty*period), omega_sq_low on the rest.
struct SquareWave {
    double omega_sq_high = 1.0;
    double omega_sq_low = 0.0;
    double duty = 0.5;
    double period = 1.0;
};

struct SamplePoint {
    double t = 0.0;
    double omega_sq = 0.0;
};

// Piecewise-linear profile over samples; t runs from 0 to the period and
// the first/last omega_sq must agree (explicit periodic closure).
struct Sampled {
    std::vector<SamplePoint> samples;
};

using FrequencyProfile = std::variant<Constant, Mathieu, SquareWave, Sampled>;

double profile_period(const FrequencyProfile& profile);

// Evaluates omega^2 at t folded into [0, period); any real t is accepted.
double omega_sq_at(const FrequencyProfile& profile, double t);

// Throws std::invalid_argument on structural problems (non-positive
// period, duty outside (0,1), too few samples, non-monotone t, open
// endpoints, non-finite values).
void validate_profile(const FrequencyProfile& profile);

// Non-fatal advisories, e.g. a Mathieu profile whose omega^2 dips
// non-positive. Empty when nothing is noteworthy.
std::vector<std::string> profile_warnings(const FrequencyProfile& profile);

// -- sampled-profile ingestion ----------------------------------------------

// CSV with mandatory header "t, omega_sq" and two numeric columns per
// row. Errors mention the 1-based line number.
Sampled parse_sampled_csv(std::istream& in);
Sampled parse_sampled_csv_file(const std::string& path);

// -- slice products ---------------------------------------------------------

// Exact constant-coefficient flow over dt: rotation for omega_sq > 0,
// cosh/sinh form for omega_sq < 0, shear for omega_sq == 0.
Mat2 slice_matrix(double omega_sq, double dt, double m);

// Product of n_slices exact slice flows with omega^2 sampled at slice
// midpoints; later slices multiply from the left.
Mat2 monodromy_slices(const FrequencyProfile& profile, double m, int n_slices);

struct SliceProduct {
    Mat2 result;
    int n_slices = 0;
    // (N, max-entry deviation between the N/2- and N-slice products),
    // one entry per doubling actually performed.
    std::vector<std::pair<int, double>> history;
};

// Doubles the slice count from 64 until successive products agree to
// tol; throws std::runtime_error past 2^20 slices.
SliceProduct monodromy_converged(const FrequencyProfile& profile, double m, double tol);

// Fixed-step 4th-order integration of the fundamental matrix over one
// period; independent of the slice-product path. steps >= 100.
Mat2 rk4_oracle(const FrequencyProfile& profile, double m, int steps);

// -- boundary tracing -------------------------------------------------------

struct BoundaryPoint {
    double param = 0.0;
    int side = 0;  // +1 when Tr M = +2 at the root, -1 when Tr M = -2
};

// Scans f(p) = |Tr M(p)|/2 - 1 on a uniform grid over [lo, hi] and
// bisects every sign-change bracket to |interval| < tol. Throws
// std::runtime_error when no sign change is found.
std::vector<BoundaryPoint> trace_boundary(const std::function<Mat2(double)>& family,
                                          double lo, double hi, double tol,
                                          int subdivisions = 64);

}  // namespace parres::freq
