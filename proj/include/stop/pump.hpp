#ifndef STOP_PUMP_HPP
#define STOP_PUMP_HPP

#include <optional>
#include <vector>

#include "stop/instance.hpp"
#include "stop/lp.hpp"
#include "stop/model.hpp"
#include "stop/rng.hpp"

namespace stop {

struct PumpConfig {
    int max_pumps = 2000;
    double decay = 0.0;   // gamma decay rate; 0 recovers the plain pump
    int flip_basis = 10;  // perturbation amplitude basis
};

enum class PumpStatus { Found, Exhausted, Infeasible };

struct PumpTraceRecord {
    int pump = 0;
    double gamma = 0.0;
    double distance = 0.0;     // Delta between the LP point and the rounded one
    double lp_objective = 0.0; // auxiliary problem value
    int flips = 0;             // entries flipped when a cycle was broken
};

struct PumpOutcome {
    PumpStatus status = PumpStatus::Exhausted;
    std::optional<Solution> solution;
    int pumps_used = 0;
    double wall_seconds = 0.0;
    std::vector<PumpTraceRecord> trace;
};

// Auxiliary objective: convex combination of the normalized distance to the
// rounded vector and the normalized negated profit, as minimization
// coefficients over the model variables. The dropped constant is returned
// through `offset` when given.
std::vector<double> distance_objective(const StopModel& model, const Instance& inst,
                                       const std::vector<char>& x_tilde, double gamma,
                                       double* offset = nullptr);

// Alternates LP solves and roundings until the arc vector comes out integer,
// flipping rand(K/2, 3K/2) of the most fractional entries on one-cycles.
// Operates on whatever model the backend currently holds.
PumpOutcome pump(const Instance& inst, const StopModel& model, LpBackend& backend,
                 const PumpConfig& cfg, Rng& rng);

// Decodes a binary arc vector into routes by walking successors from the
// origin, one route per unit of outflow.
Solution extract_solution(const Instance& inst, const std::vector<char>& x);

}  // namespace stop

#endif
