#include <parres/frequency_modulation.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace parres::freq {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void require_finite(double x, const std::string& what) {
    require(std::isfinite(x), what + " must be finite");
}

// Folds t into [0, period); exact multiples land on 0.
double fold(double t, double period) {
    double r = t - period * std::floor(t / period);
    if (r >= period) r -= period;  // guard against rounding at the seam
    return r;
}

double sampled_value(const Sampled& s, double t) {
    if (s.samples.empty()) throw std::invalid_argument("sampled profile has no samples");
    const double period = s.samples.back().t;
    const double tf = fold(t, period);
    // First sample with t strictly greater than tf; its predecessor
    // starts the containing segment.
    auto hi = std::upper_bound(s.samples.begin(), s.samples.end(), tf,
                               [](double v, const SamplePoint& p) { return v < p.t; });
    if (hi == s.samples.begin()) return s.samples.front().omega_sq;
    if (hi == s.samples.end()) return s.samples.back().omega_sq;
    const auto lo = hi - 1;
    const double span = hi->t - lo->t;
    const double w = (tf - lo->t) / span;
    return lo->omega_sq + w * (hi->omega_sq - lo->omega_sq);
}

}  // namespace

double profile_period(const FrequencyProfile& profile) {
    return std::visit(
        [](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Constant>) {
                return p.period;
            } else if constexpr (std::is_same_v<P, Mathieu>) {
                return 2.0 * M_PI / p.omega0;
            } else if constexpr (std::is_same_v<P, SquareWave>) {
                return p.period;
            } else {
                if (p.samples.empty()) {
                    throw std::invalid_argument("sampled profile has no samples");
                }
                return p.samples.back().t;
            }
        },
        profile);
}

double omega_sq_at(const FrequencyProfile& profile, double t) {
    return std::visit(
        [t](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Constant>) {
                return p.omega_sq;
            } else if constexpr (std::is_same_v<P, Mathieu>) {
                return p.l - p.delta_l * std::cos(p.omega0 * t);
            } else if constexpr (std::is_same_v<P, SquareWave>) {
                const double tf = fold(t, p.period);
                return tf < p.duty * p.period ? p.omega_sq_high : p.omega_sq_low;
            } else {
                return sampled_value(p, t);
            }
        },
        profile);
}

void validate_profile(const FrequencyProfile& profile) {
    std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Constant>) {
                require_finite(p.omega_sq, "constant omega_sq");
                require_finite(p.period, "period");
                require(p.period > 0.0, "period must be positive");
            } else if constexpr (std::is_same_v<P, Mathieu>) {
                require_finite(p.l, "l");
                require_finite(p.delta_l, "delta_l");
                require_finite(p.omega0, "omega0");
                require(p.omega0 > 0.0, "omega0 must be positive");
            } else if constexpr (std::is_same_v<P, SquareWave>) {
                require_finite(p.omega_sq_high, "omega_sq_high");
                require_finite(p.omega_sq_low, "omega_sq_low");
                require_finite(p.period, "period");
                require(p.period > 0.0, "period must be positive");
                require(p.duty > 0.0 && p.duty < 1.0, "duty must lie in (0, 1)");
            } else {
                require(p.samples.size() >= 2, "sampled profile needs at least 2 points");
                require(p.samples.front().t == 0.0, "sampled profile must start at t = 0");
                for (const auto& pt : p.samples) {
                    require_finite(pt.t, "sample time");
                    require_finite(pt.omega_sq, "sample omega_sq");
                }
                for (std::size_t i = 1; i < p.samples.size(); ++i) {
                    require(p.samples[i].t > p.samples[i - 1].t,
                            "sample times must be strictly increasing");
                }
                require(p.samples.front().omega_sq == p.samples.back().omega_sq,
                        "first and last omega_sq must agree (periodic closure)");
            }
        },
        profile);
}

std::vector<std::string> profile_warnings(const FrequencyProfile& profile) {
    std::vector<std::string> out;
    if (const auto* m = std::get_if<Mathieu>(&profile)) {
        if (m->l - std::abs(m->delta_l) <= 0.0) {
            out.push_back("omega^2(t) dips non-positive (l - |delta_l| <= 0): "
                          "inverted-pendulum regime");
        }
    }
    return out;
}

// -- sampled-profile ingestion ----------------------------------------------

namespace {

[[noreturn]] void csv_fail(int line, const std::string& what) {
    throw std::invalid_argument("csv line " + std::to_string(line) + ": " + what);
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Sampled parse_sampled_csv(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) csv_fail(1, "empty input, expected header 't, omega_sq'");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string c1, c2;
        std::getline(hs, c1, ',');
        std::getline(hs, c2);
        if (strip(c1) != "t" || strip(c2) != "omega_sq") {
            csv_fail(lineno, "expected header 't, omega_sq', got '" + strip(line) + "'");
        }
    }
    Sampled out;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        std::istringstream ls(line);
        std::string c1, c2;
        std::getline(ls, c1, ',');
        if (!std::getline(ls, c2)) csv_fail(lineno, "expected two comma-separated columns");
        std::size_t used = 0;
        SamplePoint pt;
        try {
            pt.t = std::stod(strip(c1), &used);
            if (used != strip(c1).size()) throw std::invalid_argument("");
            pt.omega_sq = std::stod(strip(c2), &used);
            if (used != strip(c2).size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            csv_fail(lineno, "could not parse numbers from '" + strip(line) + "'");
        }
        if (!out.samples.empty() && pt.t <= out.samples.back().t) {
            csv_fail(lineno, "sample times must be strictly increasing");
        }
        out.samples.push_back(pt);
    }
    if (out.samples.size() < 2) csv_fail(lineno, "need at least 2 samples");
    if (out.samples.front().t != 0.0) csv_fail(2, "first sample must be at t = 0");
    if (out.samples.front().omega_sq != out.samples.back().omega_sq) {
        csv_fail(lineno, "first and last omega_sq must agree (periodic closure)");
    }
    return out;
}

Sampled parse_sampled_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return parse_sampled_csv(in);
}

// -- slice products ---------------------------------------------------------

Mat2 slice_matrix(double omega_sq, double dt, double m) {
    if (omega_sq > 0.0) {
        const double k = std::sqrt(omega_sq);
        const double c = std::cos(k * dt), s = std::sin(k * dt);
        return {c, s / (m * k), -m * k * s, c};
    }
    if (omega_sq < 0.0) {
        const double k = std::sqrt(-omega_sq);
        const double c = std::cosh(k * dt), s = std::sinh(k * dt);
        return {c, s / (m * k), m * k * s, c};
    }
    return {1.0, dt / m, 0.0, 1.0};
}

Mat2 monodromy_slices(const FrequencyProfile& profile, double m, int n_slices) {
    validate_profile(profile);
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("mass must be positive");
    if (n_slices < 1) throw std::invalid_argument("n_slices must be >= 1");
    const double T = profile_period(profile);
    const double dt = T / static_cast<double>(n_slices);
    Mat2 M = Mat2::identity();
    for (int n = 0; n < n_slices; ++n) {
        const double tm = (static_cast<double>(n) + 0.5) * dt;
        M = slice_matrix(omega_sq_at(profile, tm), dt, m) * M;
    }
    return M;
}

SliceProduct monodromy_converged(const FrequencyProfile& profile, double m, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    constexpr int kStart = 64;
    constexpr int kMax = 1 << 20;
    SliceProduct out;
    Mat2 prev = monodromy_slices(profile, m, kStart);
    for (int n = 2 * kStart; n <= kMax; n *= 2) {
        const Mat2 cur = monodromy_slices(profile, m, n);
        const double dev = max_abs_diff(prev, cur);
        out.history.emplace_back(n, dev);
        if (dev < tol) {
            out.result = cur;
            out.n_slices = n;
            return out;
        }
        prev = cur;
    }
    throw std::runtime_error("slice product did not converge below tol by 2^20 slices");
}

Mat2 rk4_oracle(const FrequencyProfile& profile, double m, int steps) {
    validate_profile(profile);
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("mass must be positive");
    if (steps < 100) throw std::invalid_argument("rk4 oracle needs steps >= 100");
    const double T = profile_period(profile);
    const double h = T / static_cast<double>(steps);
    const auto A_times = [&](double t, const Mat2& X) -> Mat2 {
        // System matrix [[0, 1/m], [-m omega^2(t), 0]] applied to X.
        const double a = -m * omega_sq_at(profile, t);
        return {X.m21 / m, X.m22 / m, a * X.m11, a * X.m12};
    };
    Mat2 X = Mat2::identity();
    for (int n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * h;
        const Mat2 k1 = A_times(t, X);
        const Mat2 k2 = A_times(t + 0.5 * h, X + (0.5 * h) * k1);
        const Mat2 k3 = A_times(t + 0.5 * h, X + (0.5 * h) * k2);
        const Mat2 k4 = A_times(t + h, X + h * k3);
        X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return X;
}

// -- boundary tracing -------------------------------------------------------

std::vector<BoundaryPoint> trace_boundary(const std::function<Mat2(double)>& family,
                                          double lo, double hi, double tol,
                                          int subdivisions) {
    if (!family) throw std::invalid_argument("family callback must be set");
    if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");

    const auto f = [&](double p) { return std::abs(0.5 * family(p).trace()) - 1.0; };
    std::vector<BoundaryPoint> roots;
    const auto emit = [&](double p) {
        roots.push_back({p, family(p).trace() > 0.0 ? 1 : -1});
    };

    const double step = (hi - lo) / static_cast<double>(subdivisions);
    double pa = lo, fa = f(lo);
    if (fa == 0.0) emit(pa);
    for (int i = 1; i <= subdivisions; ++i) {
        const double pb = i == subdivisions ? hi : lo + step * static_cast<double>(i);
        const double fb = f(pb);
        if (fb == 0.0) {
            emit(pb);
        } else if (fa != 0.0 && std::signbit(fa) != std::signbit(fb)) {
            double a = pa, b = pb, va = fa;
            while (b - a > tol) {
                const double mid = 0.5 * (a + b);
                const double vm = f(mid);
                if (vm == 0.0) {
                    a = b = mid;
                    break;
                }
                if (std::signbit(vm) == std::signbit(va)) {
                    a = mid;
                    va = vm;
                } else {
                    b = mid;
                }
            }
            emit(0.5 * (a + b));
        }
        pa = pb;
        fa = fb;
    }
    if (roots.empty()) {
        throw std::runtime_error("no stability boundary: |Tr|/2 - 1 has no sign change on the bracket");
    }
    return roots;
}

}  // namespace parres::freq
