#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <parres/core_classical.hpp>
#include <parres/mat2.hpp>

// Parameter-plane stability sweeps (Arnold-tongue charts) with exponent
// fields, refined tongue-boundary polylines, and CSV/JSON serialization.

namespace parres::chart {

enum class Family { kicked, mathieu, custom };

enum class CellClass { elliptic, hyperbolic, hyperbolic_reflected, marginal, error };

const char* cell_class_name(CellClass cls);

struct AxisSpec {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    int resolution = 2;  // grid points, endpoints included
};

struct SweepSpec {
    Family family = Family::kicked;
    // axis1 varies fastest in the output; axis2 is the outer loop.
    // kicked: axis1 = omega*T, axis2 = alpha. mathieu: axis1 = l,
    // axis2 = delta_l.
    AxisSpec axis1;
    AxisSpec axis2;
    double mass = 1.0;
    double omega0 = 2.0;      // mathieu drive frequency
    double band = classical::kDefaultBand;
    double slice_tol = 1e-10; // mathieu monodromy convergence target
    // custom family: monodromy as a function of (param1, param2); cell
    // construction failures become error-tagged cells, not aborts.
    std::function<Mat2(double, double)> monodromy;
};

struct ChartCell {
    double param1 = 0.0;
    double param2 = 0.0;
    CellClass cls = CellClass::error;
    double exponent = 0.0;  // Omega (elliptic), mu (hyperbolic), 0 (marginal)
    double trace = 0.0;
    std::string error_msg;  // only for error cells
};

// Row-major: index = i2 * axis1.resolution + i1.
std::vector<ChartCell> sweep(const SweepSpec& spec);

struct BoundaryVertex {
    double param1 = 0.0;
    double param2 = 0.0;
    int side = 0;  // +1 on the Tr = +2 boundary, -1 on Tr = -2
};

using Polyline = std::vector<BoundaryVertex>;

// Bisection-refines every grid edge where |Tr|/2 - 1 changes sign and
// chains the refined points into polylines by 8-neighborhood adjacency
// of their grid edges. Empty when the window contains no boundary.
std::vector<Polyline> tongue_boundaries(const SweepSpec& spec, double tol);

// CSV with header param1,param2,class,exponent,trace; floats carry 17
// significant digits, non-finite values print as "nan".
std::string to_csv(const std::vector<ChartCell>& cells);
void write_csv(std::ostream& out, const std::vector<ChartCell>& cells);

// Same fields as the CSV, one JSON object per cell (error cells add a
// "message"); non-finite numbers serialize as null.
std::string to_json(const std::vector<ChartCell>& cells);

// CSV with header polyline,param1,param2,side; one row per vertex.
std::string boundaries_to_csv(const std::vector<Polyline>& lines);

}  // namespace parres::chart
