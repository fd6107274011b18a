#include "stop/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stop {

namespace {

constexpr double kYPositive = 1e-9;

double norm_of(const std::vector<std::pair<int, double>>& terms) {
    double acc = 0.0;
    for (const auto& [var, coeff] : terms) acc += coeff * coeff;
    return std::sqrt(acc);
}

}  // namespace

double cut_violation(const Cut& cut, const std::vector<double>& values) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : cut.terms) lhs += coeff * values[var];
    return lhs - cut.rhs;
}

std::vector<std::pair<int, int>> conflict_pairs(const Instance& inst, const RMatrix& r,
                                                ExecPolicy policy) {
    const double limit = inst.time_limit + kTimeEps;
    const int n = inst.n;
    std::vector<std::vector<std::pair<int, int>>> rows(n);
    auto fill_row = [&](int i) {
        if (!inst.is_interior(i)) return;
        for (int j = i + 1; j < n; ++j) {
            if (!inst.is_interior(j)) continue;
            const bool forward = r.at(inst.s, i) + r.at(i, j) + r.at(j, inst.t) > limit;
            const bool backward = r.at(inst.s, j) + r.at(j, i) + r.at(i, inst.t) > limit;
            if (forward && backward) rows[i].push_back({i, j});
        }
    };
    if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) fill_row(i);
    } else {
        for (int i = 0; i < n; ++i) fill_row(i);
    }
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) pairs.insert(pairs.end(), rows[i].begin(), rows[i].end());
    return pairs;
}

ConflictStructure build_conflicts(const Instance& inst, const RMatrix& r, std::size_t clique_cap,
                                  ExecPolicy policy) {
    ConflictStructure out;
    out.pairs = conflict_pairs(inst, r, policy);

    // The conflict graph lives on the interior vertices only.
    std::vector<int> interior;
    std::vector<int> index_of(inst.n, -1);
    for (int v = 0; v < inst.n; ++v) {
        if (inst.is_interior(v)) {
            index_of[v] = static_cast<int>(interior.size());
            interior.push_back(v);
        }
    }
    UndirectedGraph g;
    g.n = static_cast<int>(interior.size());
    for (const auto& [i, j] : out.pairs) g.edges.push_back({index_of[i], index_of[j]});

    CliqueEnumeration enumeration = maximal_cliques(g, clique_cap);
    out.truncated = enumeration.truncated;
    out.cliques.reserve(enumeration.cliques.size());
    for (std::vector<int>& clique : enumeration.cliques) {
        for (int& v : clique) v = interior[v];
        std::sort(clique.begin(), clique.end());
        out.cliques.push_back(std::move(clique));
    }
    std::sort(out.cliques.begin(), out.cliques.end());

    out.cliques_of.assign(inst.n, {});
    for (std::size_t c = 0; c < out.cliques.size(); ++c) {
        for (int v : out.cliques[c]) out.cliques_of[v].push_back(static_cast<int>(c));
    }
    return out;
}

namespace {

struct CliqueFlow {
    bool computed = false;
    double flow1 = 0.0, flow2 = 0.0;
    std::vector<char> theta1, theta2;
};

// Flow tests for one clique: s -> beta on the residual support, then
// t -> beta on the arc-reversed support.
CliqueFlow run_clique_flows(const std::vector<int>& clique, const Instance& inst,
                            const std::vector<int>& residual_arcs,
                            const FractionalPoint& point) {
    CliqueFlow result;
    const int beta = inst.n;
    CapacitatedDigraph g1, g2;
    g1.n = g2.n = inst.n + 1;
    for (int a : residual_arcs) {
        const Arc& arc = inst.arcs[a];
        g1.arcs.push_back(CapArc{arc.from, arc.to, point.x[a]});
        g2.arcs.push_back(CapArc{arc.to, arc.from, point.x[a]});
    }
    for (int v : clique) {
        g1.arcs.push_back(CapArc{v, beta, static_cast<double>(inst.fleet_size)});
        g2.arcs.push_back(CapArc{v, beta, static_cast<double>(inst.fleet_size)});
    }
    MaxFlowResult f1 = max_flow(g1, inst.s, beta);
    MaxFlowResult f2 = max_flow(g2, inst.t, beta);
    result.flow1 = f1.flow_value;
    result.flow2 = f2.flow_value;
    result.theta1 = std::move(f1.source_side);
    result.theta2 = std::move(f2.source_side);
    result.computed = true;
    return result;
}

// Assembles the cut-set inequality sum_{sigma} y <= sum_{delta(V)} x in
// <= form. incoming=true uses arcs entering V, otherwise arcs leaving V.
std::optional<Cut> make_ccc(const std::vector<int>& clique, const std::vector<char>& theta,
                            const Instance& inst, const StopModel& model,
                            const FractionalPoint& point, bool incoming, double min_violation) {
    // V is everything outside the source side of the cut (beta excluded).
    std::vector<char> in_v(inst.n, 0);
    for (int v = 0; v < inst.n; ++v) in_v[v] = !theta[v];
    for (int v : clique) {
        if (!in_v[v]) return std::nullopt;  // artificial arc ended up in the cut
    }
    Cut cut;
    cut.kind = CutKind::CCC;
    for (int v : clique) cut.terms.push_back({model.y_var[v], 1.0});
    for (int a = 0; a < inst.num_arcs(); ++a) {
        const Arc& arc = inst.arcs[a];
        const bool crossing = incoming ? (!in_v[arc.from] && in_v[arc.to])
                                       : (in_v[arc.from] && !in_v[arc.to]);
        if (crossing) cut.terms.push_back({model.x_var[a], -1.0});
    }
    cut.rhs = 0.0;
    std::sort(cut.terms.begin(), cut.terms.end());
    cut.violation = cut_violation(cut, point.raw);
    cut.norm = norm_of(cut.terms);
    if (cut.violation <= min_violation) return std::nullopt;
    return cut;
}

}  // namespace

std::vector<Cut> separate_cccs(const FractionalPoint& point, const ConflictStructure& conflicts,
                               const Instance& inst, const StopModel& model,
                               const CutSelectionPolicy& policy, const CccOptions& opts) {
    std::vector<Cut> cuts;
    if (conflicts.cliques.empty()) return cuts;

    std::vector<int> residual_arcs;
    for (int a = 0; a < inst.num_arcs(); ++a) {
        if (point.x[a] > opts.residual_threshold) residual_arcs.push_back(a);
    }

    const int num_cliques = static_cast<int>(conflicts.cliques.size());
    std::vector<CliqueFlow> flows(num_cliques);

    if (opts.policy == ExecPolicy::OpenMP) {
        // All flow problems are independent of the deactivation bookkeeping,
        // so they can be computed up front and replayed in clique order.
#pragma omp parallel for schedule(dynamic)
        for (int c = 0; c < num_cliques; ++c) {
            flows[c] = run_clique_flows(conflicts.cliques[c], inst, residual_arcs, point);
        }
    }

    std::vector<char> active(num_cliques, 1);
    for (int c = 0; c < num_cliques; ++c) {
        if (opts.filter_active && !active[c]) continue;
        const std::vector<int>& clique = conflicts.cliques[c];
        double sum_y = 0.0;
        for (int v : clique) sum_y += point.y[v];

        if (!flows[c].computed) {
            flows[c] = run_clique_flows(clique, inst, residual_arcs, point);
        }
        const CliqueFlow& flow = flows[c];

        std::optional<Cut> cut;
        if (flow.flow1 < sum_y - policy.ccc_violation) {
            cut = make_ccc(clique, flow.theta1, inst, model, point, /*incoming=*/true,
                           policy.ccc_violation);
        }
        if (!cut && flow.flow2 < sum_y - policy.ccc_violation) {
            cut = make_ccc(clique, flow.theta2, inst, model, point, /*incoming=*/false,
                           policy.ccc_violation);
        }
        if (cut) {
            cuts.push_back(std::move(*cut));
            if (opts.filter_active) {
                for (int v : clique) {
                    if (point.y[v] > kYPositive) {
                        for (int other : conflicts.cliques_of[v]) active[other] = 0;
                    }
                }
            }
        }
    }
    return cuts;
}

std::vector<Cut> separate_avics(const Instance& inst, const StopModel& model) {
    std::vector<Cut> cuts;
    for (int a = 0; a < inst.num_arcs(); ++a) {
        const Arc& arc = inst.arcs[a];
        if (arc.from >= arc.to) continue;
        const int back = inst.arc_id(arc.to, arc.from);
        if (back < 0) continue;
        for (int flip = 0; flip < 2; ++flip) {
            Cut cut;
            cut.kind = CutKind::AVIC;
            const int yi = model.y_var[flip == 0 ? arc.from : arc.to];
            const int yj = model.y_var[flip == 0 ? arc.to : arc.from];
            cut.terms.push_back({yi, 1.0});
            cut.terms.push_back({yj, -1.0});
            cut.terms.push_back({model.x_var[a], 1.0});
            cut.terms.push_back({model.x_var[back], 1.0});
            cut.rhs = 1.0;
            std::sort(cut.terms.begin(), cut.terms.end());
            cut.norm = norm_of(cut.terms);
            cuts.push_back(std::move(cut));
        }
    }
    return cuts;
}

std::optional<Cut> separate_lci(const FractionalPoint& point, const Instance& inst,
                                const StopModel& model, double tau,
                                const CutSelectionPolicy& policy) {
    if (tau < 0.0) return std::nullopt;
    const long long budget = static_cast<long long>(std::floor(tau + 1e-6));

    std::vector<int> items;  // profitable vertices with positive profit
    long long total_profit = 0;
    for (int v = 0; v < inst.n; ++v) {
        if (inst.profitable[v] && inst.profit[v] > 0) {
            items.push_back(v);
            total_profit += inst.profit[v];
        }
    }
    if (total_profit <= budget) return std::nullopt;  // no cover exists

    // Minimum-cost cover via suffix DP over the still-required weight:
    // g[k][need] = cheapest way to cover `need` using items k onward, with
    // cost 1 - y_bar per item. Forward reconstruction is unambiguous.
    const long long target = budget + 1;
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t num_items = items.size();
    std::vector<std::vector<double>> g(num_items + 1, std::vector<double>(target + 1, inf));
    g[num_items][0] = 0.0;
    for (std::size_t k = num_items; k-- > 0;) {
        const double cost = 1.0 - point.y[items[k]];
        const long long w = inst.profit[items[k]];
        for (long long need = 0; need <= target; ++need) {
            double best = g[k + 1][need];
            const double taking = g[k + 1][std::max<long long>(0, need - w)] + cost;
            if (taking < best) best = taking;
            g[k][need] = best;
        }
    }
    if (!std::isfinite(g[0][target])) return std::nullopt;

    std::vector<char> in_cover(inst.n, 0);
    long long cover_sum = 0;
    {
        long long need = target;
        for (std::size_t k = 0; k < num_items && need > 0; ++k) {
            const double cost = 1.0 - point.y[items[k]];
            const long long w = inst.profit[items[k]];
            const double taking = g[k + 1][std::max<long long>(0, need - w)] + cost;
            if (taking <= g[k + 1][need] + 1e-12 && std::abs(g[k][need] - taking) <= 1e-9) {
                in_cover[items[k]] = 1;
                cover_sum += w;
                need = std::max<long long>(0, need - w);
            }
        }
        if (need > 0) return std::nullopt;  // reconstruction failed; should not happen
    }
    if (cover_sum <= budget) return std::nullopt;

    // Trim to a minimal cover; dropping low-y members raises the violation.
    bool trimmed = true;
    while (trimmed) {
        trimmed = false;
        int drop = -1;
        for (int v = 0; v < inst.n; ++v) {
            if (!in_cover[v]) continue;
            if (cover_sum - inst.profit[v] > budget) {
                if (drop < 0 || point.y[v] < point.y[drop] - 1e-12 ||
                    (std::abs(point.y[v] - point.y[drop]) <= 1e-12 &&
                     inst.profit[v] < inst.profit[drop])) {
                    drop = v;
                }
            }
        }
        if (drop >= 0) {
            in_cover[drop] = 0;
            cover_sum -= inst.profit[drop];
            trimmed = true;
        }
    }

    std::vector<int> cover;
    for (int v : items) {
        if (in_cover[v]) cover.push_back(v);
    }
    const long long rhs = static_cast<long long>(cover.size()) - 1;

    // Sequential lifting of the remaining profitable vertices, each
    // coefficient from an exact knapsack solve.
    std::vector<int> outside;
    for (int v : items) {
        if (!in_cover[v]) outside.push_back(v);
    }
    std::sort(outside.begin(), outside.end(), [&](int a, int b) {
        if (point.y[a] != point.y[b]) return point.y[a] > point.y[b];
        if (inst.profit[a] != inst.profit[b]) return inst.profit[a] > inst.profit[b];
        return a < b;
    });

    std::vector<std::pair<int, long long>> lifted;  // (vertex, coefficient)
    std::vector<long long> knap_values, knap_weights;
    for (int v : cover) {
        knap_values.push_back(1);
        knap_weights.push_back(inst.profit[v]);
    }
    for (int j : outside) {
        const long long cap = budget - inst.profit[j];
        long long coeff;
        if (cap < 0) {
            coeff = rhs;  // the vertex alone busts the budget
        } else {
            const KnapsackResult best = knapsack_max(knap_values, knap_weights, cap);
            coeff = rhs - best.best_value;
        }
        if (coeff >= 1) {
            lifted.push_back({j, coeff});
            knap_values.push_back(coeff);
            knap_weights.push_back(inst.profit[j]);
        }
    }

    Cut cut;
    cut.kind = CutKind::LCI;
    for (int v : cover) cut.terms.push_back({model.y_var[v], 1.0});
    for (const auto& [v, coeff] : lifted) {
        cut.terms.push_back({model.y_var[v], static_cast<double>(coeff)});
    }
    cut.rhs = static_cast<double>(rhs);
    std::sort(cut.terms.begin(), cut.terms.end());
    cut.violation = cut_violation(cut, point.raw);
    cut.norm = norm_of(cut.terms);
    if (cut.violation <= policy.lci_violation) return std::nullopt;
    return cut;
}

std::vector<Cut> select_cuts(std::vector<Cut> candidates, double max_inner_product) {
    if (candidates.empty()) return candidates;
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = candidates[a].norm > 0 ? candidates[a].violation / candidates[a].norm : 0;
        const double db = candidates[b].norm > 0 ? candidates[b].violation / candidates[b].norm : 0;
        return da > db;
    });
    std::vector<Cut> kept;
    for (std::size_t idx : order) {
        const Cut& cand = candidates[idx];
        bool ok = true;
        for (const Cut& chosen : kept) {
            // Sparse dot product over sorted terms.
            double dot = 0.0;
            std::size_t i = 0, j = 0;
            while (i < cand.terms.size() && j < chosen.terms.size()) {
                if (cand.terms[i].first < chosen.terms[j].first) {
                    ++i;
                } else if (cand.terms[i].first > chosen.terms[j].first) {
                    ++j;
                } else {
                    dot += cand.terms[i].second * chosen.terms[j].second;
                    ++i;
                    ++j;
                }
            }
            const double denom = cand.norm * chosen.norm;
            if (denom > 0 && dot / denom > max_inner_product) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(cand);
    }
    return kept;
}

CuttingPlaneResult cutting_plane(const Instance& inst, const RMatrix& r, const StopModel& model,
                                 LpBackend& backend, const CutFamilies& enable,
                                 const CutSelectionPolicy& policy, double epsilon1,
                                 ExecPolicy policy_exec) {
    CuttingPlaneResult result;
    backend.load(model.lp);

    auto solve_point = [&]() { return solve_lp(backend, model); };
    std::optional<FractionalPoint> point = solve_point();
    if (!point) {
        result.infeasible = true;
        return result;
    }
    result.plain_bound = point->objective;
    result.final_bound = point->objective;
    result.trace.push_back(CuttingPlaneIter{0, point->objective, 0, 0, 0});

    std::set<std::pair<std::vector<std::pair<int, double>>, double>> seen;
    auto append_new = [&](const Cut& cut) -> bool {
        if (!seen.insert({cut.terms, cut.rhs}).second) return false;
        LinearConstraint row;
        row.terms = cut.terms;
        row.sense = Sense::LE;
        row.rhs = cut.rhs;
        backend.append_constraint(row);
        result.cuts.push_back(cut);
        return true;
    };

    int iteration = 0;
    if (enable.avic) {
        int added = 0;
        for (const Cut& cut : separate_avics(inst, model)) {
            if (append_new(cut)) ++added;
        }
        point = solve_point();
        if (!point) {
            result.infeasible = true;
            return result;
        }
        ++iteration;
        result.final_bound = point->objective;
        result.trace.push_back(CuttingPlaneIter{iteration, point->objective, 0, added, 0});
    }

    ConflictStructure conflicts;
    if (enable.ccc) conflicts = build_conflicts(inst, r, 100000, policy_exec);

    const int max_rounds = 200;
    for (int round = 0; round < max_rounds; ++round) {
        const double previous = point->objective;
        int ccc_added = 0, lci_added = 0;
        if (enable.ccc) {
            CccOptions opts;
            opts.policy = policy_exec;
            std::vector<Cut> candidates = separate_cccs(*point, conflicts, inst, model, policy,
                                                        opts);
            for (const Cut& cut : select_cuts(std::move(candidates), policy.ccc_max_inner)) {
                if (append_new(cut)) ++ccc_added;
            }
        }
        if (enable.lci) {
            std::optional<Cut> lci = separate_lci(*point, inst, model, point->objective, policy);
            if (lci && append_new(*lci)) ++lci_added;
        }
        if (ccc_added + lci_added == 0) break;

        point = solve_point();
        if (!point) {
            result.infeasible = true;
            return result;
        }
        ++iteration;
        result.final_bound = point->objective;
        result.trace.push_back(
            CuttingPlaneIter{iteration, point->objective, ccc_added, 0, lci_added});
        if (previous - point->objective <= epsilon1) break;
    }
    return result;
}

}  // namespace stop
