#include "stop/pump.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stop {

std::vector<double> distance_objective(const StopModel& model, const Instance& inst,
                                       const std::vector<char>& x_tilde, double gamma,
                                       double* offset) {
    std::vector<double> coeffs(model.lp.num_vars(), 0.0);
    const int num_arcs = inst.num_arcs();
    double constant = 0.0;

    const double dist_scale = num_arcs > 0 ? (1.0 - gamma) / std::sqrt(num_arcs) : 0.0;
    for (int a = 0; a < num_arcs; ++a) {
        if (x_tilde[a]) {
            coeffs[model.x_var[a]] -= dist_scale;
            constant += dist_scale;
        } else {
            coeffs[model.x_var[a]] += dist_scale;
        }
    }

    double profit_norm = 0.0;
    for (int v = 0; v < inst.n; ++v) {
        if (inst.profitable[v]) {
            profit_norm += static_cast<double>(inst.profit[v]) * inst.profit[v];
        }
    }
    profit_norm = std::sqrt(profit_norm);
    if (profit_norm > 0.0) {
        const double profit_scale = gamma / profit_norm;
        for (int v = 0; v < inst.n; ++v) {
            if (inst.profitable[v]) coeffs[model.y_var[v]] -= profit_scale * inst.profit[v];
        }
    }
    if (offset) *offset = constant;
    return coeffs;
}

Solution extract_solution(const Instance& inst, const std::vector<char>& x) {
    // Successor lists in arc order, consumed one use at a time.
    std::vector<std::vector<int>> next(inst.n);
    int selected = 0;
    for (int a = 0; a < inst.num_arcs(); ++a) {
        if (x[a]) {
            next[inst.arcs[a].from].push_back(inst.arcs[a].to);
            ++selected;
        }
    }
    for (auto& lst : next) std::reverse(lst.begin(), lst.end());  // pop_back in arc order

    Solution sol;
    while (!next[inst.s].empty()) {
        Route route;
        route.vertices.push_back(inst.s);
        int current = inst.s;
        int steps = 0;
        while (current != inst.t) {
            if (next[current].empty()) {
                throw std::runtime_error("extract_solution: dangling arcs at vertex " +
                                         std::to_string(current));
            }
            if (++steps > inst.n + 1) {
                throw std::runtime_error("extract_solution: walk exceeds vertex count");
            }
            const int to = next[current].back();
            next[current].pop_back();
            --selected;
            route.vertices.push_back(to);
            current = to;
        }
        sol.routes.push_back(std::move(route));
    }
    if (selected != 0) {
        throw std::runtime_error("extract_solution: disconnected arcs remain");
    }
    sol.refresh(inst);
    return sol;
}

namespace {

double distance_between(const std::vector<double>& x, const std::vector<char>& x_tilde) {
    double acc = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        acc += x_tilde[a] ? 1.0 - x[a] : x[a];
    }
    return acc;
}

// Flip the requested number of entries, most fractional first. When fewer
// mismatched entries exist, the remaining flips land on uniformly random
// arcs.
int perturb(std::vector<char>& x_tilde, const std::vector<double>& x, int count, Rng& rng) {
    const int num_arcs = static_cast<int>(x_tilde.size());
    count = std::min(count, num_arcs);
    std::vector<int> mismatched;
    for (int a = 0; a < num_arcs; ++a) {
        if (std::abs(x[a] - x_tilde[a]) > 1e-9) mismatched.push_back(a);
    }
    std::stable_sort(mismatched.begin(), mismatched.end(), [&](int a, int b) {
        return std::abs(x[a] - x_tilde[a]) > std::abs(x[b] - x_tilde[b]);
    });
    std::vector<char> flipped(num_arcs, 0);
    int done = 0;
    for (int a : mismatched) {
        if (done == count) break;
        x_tilde[a] = !x_tilde[a];
        flipped[a] = 1;
        ++done;
    }
    if (done < count) {
        std::vector<int> rest;
        for (int a = 0; a < num_arcs; ++a) {
            if (!flipped[a]) rest.push_back(a);
        }
        rng.shuffle(rest);
        for (int a : rest) {
            if (done == count) break;
            x_tilde[a] = !x_tilde[a];
            ++done;
        }
    }
    return done;
}

}  // namespace

PumpOutcome pump(const Instance& inst, const StopModel& model, LpBackend& backend,
                 const PumpConfig& cfg, Rng& rng) {
    const auto start_time = std::chrono::steady_clock::now();
    PumpOutcome out;
    auto finish = [&](PumpStatus status) {
        out.status = status;
        out.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
        return out;
    };
    auto decode = [&](const std::vector<double>& x) {
        Solution sol = extract_solution(inst, round_point(x));
        const ValidationReport report = validate_solution(inst, sol);
        if (!report.feasible) {
            throw std::logic_error("pump: decoded solution fails validation");
        }
        out.solution = std::move(sol);
    };

    double gamma = 1.0;
    int iter_counter = 1;
    std::vector<char> x_tilde(inst.num_arcs(), 0);

    backend.set_objective(distance_objective(model, inst, x_tilde, gamma), false);
    std::optional<FractionalPoint> point = solve_lp(backend, model);
    if (!point) return finish(PumpStatus::Infeasible);
    out.trace.push_back(PumpTraceRecord{1, gamma, distance_between(point->x, round_point(point->x)),
                                        point->objective, 0});
    out.pumps_used = 1;
    if (is_integral(point->x)) {
        decode(point->x);
        return finish(PumpStatus::Found);
    }
    x_tilde = round_point(point->x);

    while (iter_counter < cfg.max_pumps) {
        gamma *= cfg.decay;
        ++iter_counter;
        backend.set_objective(distance_objective(model, inst, x_tilde, gamma), false);
        point = solve_lp(backend, model);
        if (!point) return finish(PumpStatus::Infeasible);

        PumpTraceRecord record{iter_counter, gamma, distance_between(point->x, x_tilde),
                               point->objective, 0};
        out.pumps_used = iter_counter;
        if (is_integral(point->x)) {
            out.trace.push_back(record);
            decode(point->x);
            return finish(PumpStatus::Found);
        }
        const std::vector<char> rounded = round_point(point->x);
        if (rounded != x_tilde) {
            x_tilde = rounded;
        } else {
            // One-cycle: flip a random amount in the open interval
            // (K/2, 3K/2) of the most conflicted entries.
            const int lo = cfg.flip_basis / 2 + 1;
            const int hi = (3 * cfg.flip_basis + 1) / 2 - 1;
            const int count = hi >= lo ? rng.uniform_int(lo, hi) : lo;
            record.flips = perturb(x_tilde, point->x, count, rng);
        }
        out.trace.push_back(record);
    }
    return finish(PumpStatus::Exhausted);
}

}  // namespace stop
