#include "stop/instance.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace stop {

void Instance::init(int num_vertices) {
    n = num_vertices;
    mandatory.assign(n, 0);
    profitable.assign(n, 0);
    profit.assign(n, 0);
    coords.assign(n, Point{});
    orig_id.resize(n);
    for (int i = 0; i < n; ++i) orig_id[i] = i;
    arcs.clear();
    rebuild_adjacency();
}

void Instance::rebuild_adjacency() {
    lookup_.assign(static_cast<std::size_t>(n) * n, -1);
    out_.assign(n, {});
    in_.assign(n, {});
    for (int a = 0; a < num_arcs(); ++a) {
        const Arc& arc = arcs[a];
        lookup_[static_cast<std::size_t>(arc.from) * n + arc.to] = a;
        out_[arc.from].push_back(a);
        in_[arc.to].push_back(a);
    }
}

void build_graph(Instance& inst) {
    if (!inst.has_coords) throw std::runtime_error("build_graph: instance has no coordinates");
    inst.arcs.clear();
    inst.arcs.reserve(static_cast<std::size_t>(inst.n) * (inst.n - 1));
    for (int i = 0; i < inst.n; ++i) {
        for (int j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            const double dx = inst.coords[i].x - inst.coords[j].x;
            const double dy = inst.coords[i].y - inst.coords[j].y;
            inst.arcs.push_back(Arc{i, j, std::sqrt(dx * dx + dy * dy)});
        }
    }
    inst.rebuild_adjacency();
}

RMatrix shortest_times(const Instance& inst, ExecPolicy policy) {
    const int n = inst.n;
    RMatrix r(n);
    for (const Arc& a : inst.arcs) {
        if (a.time < r.at(a.from, a.to)) r.at(a.from, a.to) = a.time;
    }
    for (int k = 0; k < n; ++k) {
        if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) {
                const double rik = r.at(i, k);
                if (!std::isfinite(rik)) continue;
                for (int j = 0; j < n; ++j) {
                    const double via = rik + r.at(k, j);
                    if (via < r.at(i, j)) r.at(i, j) = via;
                }
            }
        } else {
            for (int i = 0; i < n; ++i) {
                const double rik = r.at(i, k);
                if (!std::isfinite(rik)) continue;
                for (int j = 0; j < n; ++j) {
                    const double via = rik + r.at(k, j);
                    if (via < r.at(i, j)) r.at(i, j) = via;
                }
            }
        }
    }
    return r;
}

namespace {

// One pruning pass. Returns true if anything was removed.
bool prune_once(Instance& inst, const RMatrix& r, std::vector<int>& pruned_mandatory) {
    const double limit = inst.time_limit + kTimeEps;
    std::vector<char> keep_vertex(inst.n, 1);
    bool changed = false;

    for (int v = 0; v < inst.n; ++v) {
        if (!inst.is_interior(v)) continue;
        if (!inst.mandatory[v] && !inst.profitable[v]) continue;
        if (r.at(inst.s, v) + r.at(v, inst.t) > limit) {
            keep_vertex[v] = 0;
            changed = true;
            if (inst.mandatory[v]) pruned_mandatory.push_back(inst.orig_id[v]);
        }
    }

    std::vector<Arc> kept_arcs;
    kept_arcs.reserve(inst.arcs.size());
    for (const Arc& a : inst.arcs) {
        if (!keep_vertex[a.from] || !keep_vertex[a.to]) {
            changed = true;
            continue;
        }
        if (a.to == inst.s || a.from == inst.t) {
            changed = true;
            continue;
        }
        if (r.at(inst.s, a.from) + a.time + r.at(a.to, inst.t) > limit) {
            changed = true;
            continue;
        }
        kept_arcs.push_back(a);
    }
    if (!changed) return false;

    // Renumber the surviving vertices, keeping file order.
    std::vector<int> new_id(inst.n, -1);
    int next = 0;
    for (int v = 0; v < inst.n; ++v) {
        if (keep_vertex[v]) new_id[v] = next++;
    }

    Instance pruned;
    pruned.n = next;
    pruned.s = new_id[inst.s];
    pruned.t = new_id[inst.t];
    pruned.fleet_size = inst.fleet_size;
    pruned.time_limit = inst.time_limit;
    pruned.has_coords = inst.has_coords;
    pruned.name = inst.name;
    pruned.mandatory.assign(next, 0);
    pruned.profitable.assign(next, 0);
    pruned.profit.assign(next, 0);
    pruned.coords.assign(next, Point{});
    pruned.orig_id.assign(next, 0);
    for (int v = 0; v < inst.n; ++v) {
        if (new_id[v] < 0) continue;
        const int w = new_id[v];
        pruned.mandatory[w] = inst.mandatory[v];
        pruned.profitable[w] = inst.profitable[v];
        pruned.profit[w] = inst.profit[v];
        if (inst.has_coords) pruned.coords[w] = inst.coords[v];
        pruned.orig_id[w] = inst.orig_id[v];
    }
    pruned.arcs.reserve(kept_arcs.size());
    for (const Arc& a : kept_arcs) {
        pruned.arcs.push_back(Arc{new_id[a.from], new_id[a.to], a.time});
    }
    pruned.rebuild_adjacency();
    inst = std::move(pruned);
    return true;
}

}  // namespace

PreprocessResult preprocess(const Instance& inst, const RMatrix& r) {
    PreprocessResult result;
    result.instance = inst;
    result.r = r;
    while (prune_once(result.instance, result.r, result.pruned_mandatory)) {
        result.r = shortest_times(result.instance);
    }
    result.provably_infeasible = !result.pruned_mandatory.empty();
    return result;
}

double route_time(const Instance& inst, const Route& route) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < route.vertices.size(); ++k) {
        const int i = route.vertices[k];
        const int j = route.vertices[k + 1];
        if (!inst.has_arc(i, j)) {
            throw std::runtime_error("route_time: missing arc " + std::to_string(i) + "->" +
                                     std::to_string(j));
        }
        total += inst.arc_time(i, j);
    }
    return total;
}

long long route_profit(const Instance& inst, const Route& route) {
    long long total = 0;
    for (int v : route.vertices) {
        if (inst.profitable[v]) total += inst.profit[v];
    }
    return total;
}

void Solution::refresh(const Instance& inst) {
    profit_sum = 0;
    total_time = 0.0;
    for (Route& r : routes) {
        r.duration = route_time(inst, r);
        total_time += r.duration;
        profit_sum += route_profit(inst, r);
    }
}

std::vector<char> Solution::visited_mask(const Instance& inst) const {
    std::vector<char> mask(inst.n, 0);
    for (const Route& r : routes) {
        for (int v : r.vertices) mask[v] = 1;
    }
    return mask;
}

int Solution::visited_count() const {
    int count = 0;
    std::vector<int> seen;
    for (const Route& r : routes) {
        for (int v : r.vertices) seen.push_back(v);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    count = static_cast<int>(seen.size());
    return count;
}

ValidationReport validate_solution(const Instance& inst, const Solution& sol) {
    ValidationReport report;
    auto flag = [&](ViolationKind kind, std::string detail) {
        report.feasible = false;
        report.violations.push_back(Violation{kind, std::move(detail)});
    };

    if (static_cast<int>(sol.routes.size()) > inst.fleet_size) {
        flag(ViolationKind::TooManyRoutes,
             std::to_string(sol.routes.size()) + " routes for fleet of " +
                 std::to_string(inst.fleet_size));
    }

    std::vector<int> visit_count(inst.n, 0);
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
        const Route& route = sol.routes[ri];
        const std::string tag = "route " + std::to_string(ri);
        for (int v : route.vertices) {
            if (v < 0 || v >= inst.n) {
                throw std::out_of_range(tag + ": vertex id " + std::to_string(v) +
                                        " out of range");
            }
        }
        if (route.vertices.size() < 2 || route.vertices.front() != inst.s ||
            route.vertices.back() != inst.t) {
            flag(ViolationKind::BadTerminal, tag + " does not run from origin to destination");
            continue;
        }
        double duration = 0.0;
        bool arcs_ok = true;
        for (std::size_t k = 0; k + 1 < route.vertices.size(); ++k) {
            const int i = route.vertices[k];
            const int j = route.vertices[k + 1];
            if (!inst.has_arc(i, j)) {
                flag(ViolationKind::MissingArc,
                     tag + ": no arc " + std::to_string(i) + "->" + std::to_string(j));
                arcs_ok = false;
            } else {
                duration += inst.arc_time(i, j);
            }
        }
        if (arcs_ok && duration > inst.time_limit + kTimeEps) {
            flag(ViolationKind::TimeLimit,
                 tag + " takes " + std::to_string(duration) + " > T=" +
                     std::to_string(inst.time_limit));
        }
        for (int v : route.vertices) ++visit_count[v];
    }

    for (int v = 0; v < inst.n; ++v) {
        if (inst.is_interior(v)) {
            if (visit_count[v] > 1) {
                flag(ViolationKind::DuplicateVisit,
                     "vertex " + std::to_string(v) + " visited " +
                         std::to_string(visit_count[v]) + " times");
            }
            if (inst.mandatory[v] && visit_count[v] == 0) {
                flag(ViolationKind::MissingMandatory,
                     "mandatory vertex " + std::to_string(v) + " unvisited");
            }
        } else {
            // s and t appear once per route; a repeat within one route is a
            // duplicate.
            for (const Route& route : sol.routes) {
                int in_route = 0;
                for (int u : route.vertices) {
                    if (u == v) ++in_route;
                }
                if (in_route > 1) {
                    flag(ViolationKind::DuplicateVisit,
                         "terminal " + std::to_string(v) + " repeated within a route");
                    break;
                }
            }
        }
    }
    return report;
}

}  // namespace stop
