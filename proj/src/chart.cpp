#include <parres/chart.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include <parres/frequency_modulation.hpp>

namespace parres::chart {

namespace {

// -- formatting --------------------------------------------------------

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// -- grids -------------------------------------------------------------

void validate_axis(const AxisSpec& a, const char* which) {
    if (a.resolution < 2)
        throw std::invalid_argument(std::string("sweep: ") + which +
                                    " resolution must be at least 2");
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi))
        throw std::invalid_argument(std::string("sweep: ") + which +
                                    " range must be finite and increasing");
}

double axis_value(const AxisSpec& a, int i) {
    if (i == a.resolution - 1) return a.hi;
    return a.lo + (a.hi - a.lo) * (static_cast<double>(i) /
                                   static_cast<double>(a.resolution - 1));
}

std::function<Mat2(double, double)> family_monodromy(const SweepSpec& spec) {
    switch (spec.family) {
        case Family::kicked: {
            const double m = spec.mass;
            return [m](double wT, double alpha) {
                return classical::free_matrix(m, 1.0, wT) *
                       classical::kick_matrix(alpha);
            };
        }
        case Family::mathieu: {
            const double m = spec.mass;
            const double w0 = spec.omega0;
            const double tol = spec.slice_tol;
            return [m, w0, tol](double l, double dl) {
                freq::Mathieu prof{l, dl, w0};
                return freq::monodromy_converged(prof, m, tol).result;
            };
        }
        case Family::custom:
            if (!spec.monodromy)
                throw std::invalid_argument(
                    "sweep: custom family requires a monodromy callback");
            return spec.monodromy;
    }
    throw std::invalid_argument("sweep: unknown family");
}

ChartCell make_cell(const std::function<Mat2(double, double)>& mono,
                    double band, double p1, double p2) {
    ChartCell cell;
    cell.param1 = p1;
    cell.param2 = p2;
    try {
        const Mat2 M = mono(p1, p2);
        cell.trace = M.trace();
        const auto cls = classical::classify(M, band);
        if (const auto* e = std::get_if<classical::Elliptic>(&cls)) {
            cell.cls = CellClass::elliptic;
            cell.exponent = e->Omega;
        } else if (const auto* h = std::get_if<classical::Hyperbolic>(&cls)) {
            cell.cls = h->reflected ? CellClass::hyperbolic_reflected
                                    : CellClass::hyperbolic;
            cell.exponent = h->mu;
        } else {
            cell.cls = CellClass::marginal;
            cell.exponent = 0.0;
        }
    } catch (const std::exception& ex) {
        cell.cls = CellClass::error;
        cell.exponent = std::nan("");
        cell.trace = std::nan("");
        cell.error_msg = ex.what();
    }
    return cell;
}

// -- boundary refinement -----------------------------------------------

struct EdgePoint {
    // Grid edge in doubled coordinates: a horizontal edge between cells
    // (i1, i2) and (i1 + 1, i2) sits at (2 i1 + 1, 2 i2); a vertical edge
    // between (i1, i2) and (i1, i2 + 1) at (2 i1, 2 i2 + 1).
    int cx = 0;
    int cy = 0;
    BoundaryVertex vertex;
};

bool edges_adjacent(const EdgePoint& a, const EdgePoint& b) {
    return std::abs(a.cx - b.cx) <= 2 && std::abs(a.cy - b.cy) <= 2;
}

double crossing_indicator(double trace) { return 0.5 * std::abs(trace) - 1.0; }

// Bisects |Tr|/2 - 1 along the straight segment between two grid nodes
// until the parameter interval shrinks below tol (in axis units).
BoundaryVertex refine_edge(const std::function<Mat2(double, double)>& mono,
                           double p1a, double p2a, double fa,
                           double p1b, double p2b, double fb, double tol) {
    double lo = 0.0, hi = 1.0;
    double flo = fa;
    const double seg = std::hypot(p1b - p1a, p2b - p2a);
    const double t_tol = std::max(tol / seg, 1e-15);
    auto eval = [&](double t) {
        const double p1 = p1a + (p1b - p1a) * t;
        const double p2 = p2a + (p2b - p2a) * t;
        return crossing_indicator(mono(p1, p2).trace());
    };
    (void)fb;
    while (hi - lo > t_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double t = 0.5 * (lo + hi);
    BoundaryVertex v;
    v.param1 = p1a + (p1b - p1a) * t;
    v.param2 = p2a + (p2b - p2a) * t;
    v.side = mono(v.param1, v.param2).trace() > 0.0 ? 1 : -1;
    return v;
}

}  // namespace

// -- sweep -------------------------------------------------------------

const char* cell_class_name(CellClass cls) {
    switch (cls) {
        case CellClass::elliptic: return "elliptic";
        case CellClass::hyperbolic: return "hyperbolic";
        case CellClass::hyperbolic_reflected: return "hyperbolic_reflected";
        case CellClass::marginal: return "marginal";
        case CellClass::error: return "error";
    }
    return "error";
}

std::vector<ChartCell> sweep(const SweepSpec& spec) {
    validate_axis(spec.axis1, "axis1");
    validate_axis(spec.axis2, "axis2");
    if (!(spec.band >= 0.0))
        throw std::invalid_argument("sweep: band must be nonnegative");
    const auto mono = family_monodromy(spec);
    std::vector<ChartCell> cells;
    cells.reserve(static_cast<size_t>(spec.axis1.resolution) *
                  static_cast<size_t>(spec.axis2.resolution));
    for (int i2 = 0; i2 < spec.axis2.resolution; ++i2) {
        const double p2 = axis_value(spec.axis2, i2);
        for (int i1 = 0; i1 < spec.axis1.resolution; ++i1) {
            const double p1 = axis_value(spec.axis1, i1);
            cells.push_back(make_cell(mono, spec.band, p1, p2));
        }
    }
    return cells;
}

// -- tongue boundaries -------------------------------------------------

std::vector<Polyline> tongue_boundaries(const SweepSpec& spec, double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw std::invalid_argument("tongue_boundaries: tol must be positive");
    const auto cells = sweep(spec);
    const auto mono = family_monodromy(spec);
    const int r1 = spec.axis1.resolution;
    const int r2 = spec.axis2.resolution;
    auto at = [&](int i1, int i2) -> const ChartCell& {
        return cells[static_cast<size_t>(i2) * r1 + i1];
    };

    std::vector<EdgePoint> points;
    auto consider = [&](const ChartCell& a, const ChartCell& b, int cx, int cy) {
        if (a.cls == CellClass::error || b.cls == CellClass::error) return;
        const double fa = crossing_indicator(a.trace);
        const double fb = crossing_indicator(b.trace);
        if (fa == 0.0 || std::signbit(fa) == std::signbit(fb)) return;
        EdgePoint ep;
        ep.cx = cx;
        ep.cy = cy;
        ep.vertex = refine_edge(mono, a.param1, a.param2, fa,
                                b.param1, b.param2, fb, tol);
        points.push_back(ep);
    };
    for (int i2 = 0; i2 < r2; ++i2)
        for (int i1 = 0; i1 + 1 < r1; ++i1)
            consider(at(i1, i2), at(i1 + 1, i2), 2 * i1 + 1, 2 * i2);
    for (int i2 = 0; i2 + 1 < r2; ++i2)
        for (int i1 = 0; i1 < r1; ++i1)
            consider(at(i1, i2), at(i1, i2 + 1), 2 * i1, 2 * i2 + 1);

    // Deterministic greedy chaining: points ordered by grid edge, each
    // chain grown from both ends through adjacent unused edges.
    std::sort(points.begin(), points.end(),
              [](const EdgePoint& a, const EdgePoint& b) {
                  return std::pair(a.cy, a.cx) < std::pair(b.cy, b.cx);
              });
    std::vector<bool> used(points.size(), false);
    auto next_adjacent = [&](const EdgePoint& tip) -> int {
        int best = -1;
        double best_d = 0.0;
        for (size_t j = 0; j < points.size(); ++j) {
            if (used[j] || !edges_adjacent(tip, points[j])) continue;
            const double d = std::hypot(points[j].vertex.param1 - tip.vertex.param1,
                                        points[j].vertex.param2 - tip.vertex.param2);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(j);
                best_d = d;
            }
        }
        return best;
    };

    std::vector<Polyline> lines;
    for (size_t seed = 0; seed < points.size(); ++seed) {
        if (used[seed]) continue;
        used[seed] = true;
        std::vector<EdgePoint> chain{points[seed]};
        for (int j = next_adjacent(chain.back()); j >= 0;
             j = next_adjacent(chain.back())) {
            used[j] = true;
            chain.push_back(points[j]);
        }
        std::reverse(chain.begin(), chain.end());
        for (int j = next_adjacent(chain.back()); j >= 0;
             j = next_adjacent(chain.back())) {
            used[j] = true;
            chain.push_back(points[j]);
        }
        Polyline line;
        line.reserve(chain.size());
        for (const auto& ep : chain) line.push_back(ep.vertex);
        lines.push_back(std::move(line));
    }
    return lines;
}

// -- serialization -----------------------------------------------------

std::string to_csv(const std::vector<ChartCell>& cells) {
    std::string out = "param1,param2,class,exponent,trace\n";
    for (const auto& c : cells) {
        out += fmt17(c.param1);
        out += ',';
        out += fmt17(c.param2);
        out += ',';
        out += cell_class_name(c.cls);
        out += ',';
        out += fmt17(c.exponent);
        out += ',';
        out += fmt17(c.trace);
        out += '\n';
    }
    return out;
}

void write_csv(std::ostream& out, const std::vector<ChartCell>& cells) {
    out << to_csv(cells);
}

std::string to_json(const std::vector<ChartCell>& cells) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json obj{{"param1", c.param1},
                           {"param2", c.param2},
                           {"class", cell_class_name(c.cls)},
                           {"exponent", c.exponent},
                           {"trace", c.trace}};
        if (c.cls == CellClass::error) obj["message"] = c.error_msg;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2);
}

std::string boundaries_to_csv(const std::vector<Polyline>& lines) {
    std::string out = "polyline,param1,param2,side\n";
    for (size_t i = 0; i < lines.size(); ++i) {
        for (const auto& v : lines[i]) {
            out += std::to_string(i);
            out += ',';
            out += fmt17(v.param1);
            out += ',';
            out += fmt17(v.param2);
            out += ',';
            out += std::to_string(v.side);
            out += '\n';
        }
    }
    return out;
}

}  // namespace parres::chart
