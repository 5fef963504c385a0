#include <parres/effective_hamiltonian.hpp>

#include <cmath>
#include <stdexcept>

namespace parres::heff {

namespace detail {

double delta_direct(double dsq) {
    if (dsq > 0.0) {
        const double d = std::sqrt(dsq);
        return std::asinh(d) / d;
    }
    const double d = std::sqrt(-dsq);
    return std::asin(d) / d;
}

double delta_series(double dsq) {
    return 1.0 - dsq / 6.0 + 3.0 * dsq * dsq / 40.0;
}

}  // namespace detail

double delta_of_dsq(double dsq) {
    if (!(dsq > -1.0))
        throw std::invalid_argument(
            "delta_of_dsq: requires dsq > -1 (degenerate branch below)");
    if (std::abs(dsq) < 1e-4) return detail::delta_series(dsq);
    return detail::delta_direct(dsq);
}

EffectiveGenerator heff_from_monodromy(const Mat2& M, double T, double hbar,
                                       double band) {
    if (!(T > 0.0)) throw std::invalid_argument("heff_from_monodromy: T must be positive");
    if (!(hbar > 0.0)) throw std::invalid_argument("heff_from_monodromy: hbar must be positive");
    if (!(band >= 0.0)) throw std::invalid_argument("heff_from_monodromy: band must be nonnegative");

    EffectiveGenerator gen;
    gen.half_trace = 0.5 * M.trace();
    gen.band = band;
    gen.T = T;
    gen.hbar = hbar;
    gen.reflection_factor = M.trace() < 0.0;

    const Mat2 Mp = gen.reflection_factor ? M.negated() : M;
    const double tp = 0.5 * Mp.trace();  // in [0, inf)
    const double dsq = tp * tp - 1.0;

    // factor * (Mp - tp I) is the traceless generator; the factor is the
    // entangling Delta on the hyperbolic/elliptic branches and 1 inside
    // the marginal band, where the nilpotent part is already the answer.
    double factor = 1.0;
    if (std::abs(tp - 1.0) > band) {
        factor = dsq > 0.0 ? std::asinh(std::sqrt(dsq)) / std::sqrt(dsq)
                           : std::acos(tp) / std::sqrt(1.0 - tp * tp);
    }
    gen.delta = {dsq, factor};

    const double h = 0.5 * (Mp.m11 - Mp.m22);
    const double gh = factor * h;
    gen.G = {gh, factor * Mp.m12, factor * Mp.m21, -gh};

    gen.u = gen.G.m12 / (2.0 * T);
    gen.v = -gen.G.m21 / (2.0 * T);
    gen.w = gen.G.m11 / T;
    return gen;
}

RegimeReduction regime_reduction(const EffectiveGenerator& gen) {
    const double a = std::abs(gen.half_trace);
    if (a < 1.0 - gen.band)
        return {det_traceless_compensated(gen.G), classical::Regime::elliptic};
    if (a > 1.0 + gen.band)
        return {det_traceless_compensated(gen.G), classical::Regime::hyperbolic};
    return {0.0, classical::Regime::marginal};
}

Proportionality quadratic_form_proportionality(
    const EffectiveGenerator& gen, const classical::QuadraticFormCoeffs& Q) {
    const double hn = gen.u * gen.u + gen.v * gen.v + gen.w * gen.w;
    const double qn = Q.q_pp * Q.q_pp + Q.q_xx * Q.q_xx + Q.q_xp * Q.q_xp;
    if (hn == 0.0 || qn == 0.0)
        throw std::invalid_argument(
            "quadratic_form_proportionality: both forms vanish for M = +-identity; "
            "sigma is indeterminate");
    const double sigma = (Q.q_pp * gen.u + Q.q_xx * gen.v + Q.q_xp * gen.w) / hn;
    const double rp = Q.q_pp - sigma * gen.u;
    const double rx = Q.q_xx - sigma * gen.v;
    const double rc = Q.q_xp - sigma * gen.w;
    const double residual = std::sqrt((rp * rp + rx * rx + rc * rc) / qn);
    return {sigma, residual};
}

}  // namespace parres::heff
