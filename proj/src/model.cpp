#include "stop/model.hpp"

#include <cmath>
#include <stdexcept>

namespace stop {

StopModel build_model(const Instance& inst, const RMatrix& r) {
    StopModel model;
    LinearModel& lp = model.lp;
    const int n = inst.n;
    const int num_arcs = inst.num_arcs();
    const double T = inst.time_limit;

    model.x_var.resize(num_arcs);
    model.y_var.resize(n);
    model.f_var.resize(num_arcs);
    for (int a = 0; a < num_arcs; ++a) model.x_var[a] = lp.add_var(0.0, 1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const bool fixed = inst.mandatory[i] || i == inst.s || i == inst.t;
        const double lo = fixed ? 1.0 : 0.0;
        model.y_var[i] = lp.add_var(lo, 1.0, inst.profitable[i] ? inst.profit[i] : 0.0);
    }
    for (int a = 0; a < num_arcs; ++a) model.f_var[a] = lp.add_var(0.0, kLpInf, 0.0);
    model.phi_var = lp.add_var(0.0, inst.fleet_size, 0.0);
    lp.maximize = true;

    // Out-degree equals the visit indicator.
    for (int i = 0; i < n; ++i) {
        if (!inst.is_interior(i)) continue;
        LinearConstraint c;
        for (int a : inst.out_arcs(i)) c.terms.push_back({model.x_var[a], 1.0});
        c.terms.push_back({model.y_var[i], -1.0});
        c.sense = Sense::EQ;
        c.rhs = 0.0;
        lp.add_constraint(std::move(c));
    }

    // m - phi vehicles leave the origin and reach the destination.
    {
        LinearConstraint out_s, in_t;
        for (int a : inst.out_arcs(inst.s)) out_s.terms.push_back({model.x_var[a], 1.0});
        out_s.terms.push_back({model.phi_var, 1.0});
        out_s.sense = Sense::EQ;
        out_s.rhs = inst.fleet_size;
        lp.add_constraint(std::move(out_s));
        for (int a : inst.in_arcs(inst.t)) in_t.terms.push_back({model.x_var[a], 1.0});
        in_t.terms.push_back({model.phi_var, 1.0});
        in_t.sense = Sense::EQ;
        in_t.rhs = inst.fleet_size;
        lp.add_constraint(std::move(in_t));
    }

    // Degree balance at interior vertices.
    for (int i = 0; i < n; ++i) {
        if (!inst.is_interior(i)) continue;
        LinearConstraint c;
        for (int a : inst.out_arcs(i)) c.terms.push_back({model.x_var[a], 1.0});
        for (int a : inst.in_arcs(i)) c.terms.push_back({model.x_var[a], -1.0});
        c.sense = Sense::EQ;
        c.rhs = 0.0;
        lp.add_constraint(std::move(c));
    }

    // Flow leaving the origin starts at T minus the first hop.
    for (int a : inst.out_arcs(inst.s)) {
        LinearConstraint c;
        c.terms.push_back({model.f_var[a], 1.0});
        c.terms.push_back({model.x_var[a], -(T - inst.arcs[a].time)});
        c.sense = Sense::EQ;
        c.rhs = 0.0;
        lp.add_constraint(std::move(c));
    }

    // Flow consumption at interior vertices.
    for (int i = 0; i < n; ++i) {
        if (!inst.is_interior(i)) continue;
        LinearConstraint c;
        for (int a : inst.in_arcs(i)) c.terms.push_back({model.f_var[a], 1.0});
        for (int a : inst.out_arcs(i)) {
            c.terms.push_back({model.f_var[a], -1.0});
            c.terms.push_back({model.x_var[a], -inst.arcs[a].time});
        }
        c.sense = Sense::EQ;
        c.rhs = 0.0;
        lp.add_constraint(std::move(c));
    }

    // Upper and lower flow bounds from the R matrix.
    for (int a = 0; a < num_arcs; ++a) {
        const Arc& arc = inst.arcs[a];
        if (arc.from != inst.s) {
            if (!r.reachable(inst.s, arc.from)) {
                throw std::logic_error("build_model: unreachable R entry on surviving arc");
            }
            LinearConstraint c;
            c.terms.push_back({model.f_var[a], 1.0});
            c.terms.push_back({model.x_var[a], -(T - r.at(inst.s, arc.from) - arc.time)});
            c.sense = Sense::LE;
            c.rhs = 0.0;
            lp.add_constraint(std::move(c));
        }
        if (!r.reachable(arc.to, inst.t)) {
            throw std::logic_error("build_model: unreachable R entry on surviving arc");
        }
        LinearConstraint c;
        c.terms.push_back({model.x_var[a], r.at(arc.to, inst.t)});
        c.terms.push_back({model.f_var[a], -1.0});
        c.sense = Sense::LE;
        c.rhs = 0.0;
        lp.add_constraint(std::move(c));
    }

    lp.base_constraints = static_cast<int>(lp.constraints.size());
    return model;
}

std::optional<FractionalPoint> solve_lp(LpBackend& backend, const StopModel& model) {
    const LpSolution sol = backend.solve();
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    FractionalPoint point;
    point.raw = sol.values;
    point.objective = sol.objective;
    point.x.resize(model.x_var.size());
    point.f.resize(model.f_var.size());
    point.y.resize(model.y_var.size());
    for (std::size_t a = 0; a < model.x_var.size(); ++a) point.x[a] = sol.values[model.x_var[a]];
    for (std::size_t a = 0; a < model.f_var.size(); ++a) point.f[a] = sol.values[model.f_var[a]];
    for (std::size_t i = 0; i < model.y_var.size(); ++i) point.y[i] = sol.values[model.y_var[i]];
    point.phi = sol.values[model.phi_var];
    return point;
}

bool is_integral(const std::vector<double>& values, double tol) {
    for (double v : values) {
        if (std::abs(v - std::floor(v + 0.5)) > tol) return false;
    }
    return true;
}

std::vector<char> round_point(const std::vector<double>& x) {
    std::vector<char> rounded(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        rounded[i] = static_cast<char>(std::floor(x[i] + 0.5));
    }
    return rounded;
}

FractionalPoint induced_point(const Instance& inst, const StopModel& model, const Solution& sol) {
    FractionalPoint point;
    point.raw.assign(model.lp.num_vars(), 0.0);
    point.x.assign(inst.num_arcs(), 0.0);
    point.f.assign(inst.num_arcs(), 0.0);
    point.y.assign(inst.n, 0.0);
    point.y[inst.s] = point.y[inst.t] = 1.0;

    for (const Route& route : sol.routes) {
        double elapsed = 0.0;
        for (std::size_t k = 0; k + 1 < route.vertices.size(); ++k) {
            const int i = route.vertices[k];
            const int j = route.vertices[k + 1];
            const int a = inst.arc_id(i, j);
            if (a < 0) throw std::runtime_error("induced_point: missing arc");
            elapsed += inst.arcs[a].time;
            point.x[a] = 1.0;
            point.f[a] = inst.time_limit - elapsed;
            point.y[j] = 1.0;
        }
        point.y[route.vertices.front()] = 1.0;
    }
    point.phi = inst.fleet_size - static_cast<int>(sol.routes.size());

    for (int a = 0; a < inst.num_arcs(); ++a) {
        point.raw[model.x_var[a]] = point.x[a];
        point.raw[model.f_var[a]] = point.f[a];
    }
    for (int i = 0; i < inst.n; ++i) point.raw[model.y_var[i]] = point.y[i];
    point.raw[model.phi_var] = point.phi;
    point.objective = 0.0;
    for (int i = 0; i < inst.n; ++i) {
        if (inst.profitable[i]) point.objective += inst.profit[i] * point.y[i];
    }
    return point;
}

}  // namespace stop
