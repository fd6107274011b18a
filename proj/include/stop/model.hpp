#ifndef STOP_MODEL_HPP
#define STOP_MODEL_HPP

#include <optional>
#include <vector>

#include "stop/instance.hpp"
#include "stop/lp.hpp"

namespace stop {

// Entries within this distance of {0,1} count as integer.
inline constexpr double kIntegralityTol = 1e-6;

// The commodity-flow relaxation plus the variable index maps. Variables are
// laid out as [x per arc][y per vertex][f per arc][phi].
struct StopModel {
    LinearModel lp;
    std::vector<int> x_var;
    std::vector<int> y_var;
    std::vector<int> f_var;
    int phi_var = -1;
};

struct FractionalPoint {
    std::vector<double> x;    // per arc
    std::vector<double> y;    // per vertex
    std::vector<double> f;    // per arc
    double phi = 0.0;
    double objective = 0.0;
    std::vector<double> raw;  // full variable vector, cut evaluation uses this
};

// Builds the relaxation of the commodity-flow formulation on a preprocessed
// instance. Vehicles carry T time units from the origin; R entries bound the
// flow through each arc.
StopModel build_model(const Instance& inst, const RMatrix& r);

// Solves the backend's current model and unpacks the point, or reports
// infeasibility.
std::optional<FractionalPoint> solve_lp(LpBackend& backend, const StopModel& model);

bool is_integral(const std::vector<double>& values, double tol = kIntegralityTol);

// Entrywise nearest integer, halves rounding up.
std::vector<char> round_point(const std::vector<double>& x);

// The (x, y, f, phi) assignment induced by an integral solution: route arcs
// selected, flows set by route prefix times, phi the unused vehicle count.
FractionalPoint induced_point(const Instance& inst, const StopModel& model, const Solution& sol);

}  // namespace stop

#endif
