#include "stop/lns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stop {

namespace {

constexpr double kGainEps = 1e-9;  // strict-improvement margin on times

double feasible_limit(const Instance& inst) { return inst.time_limit + kTimeEps; }

// Duration delta for inserting v between positions pos-1 and pos; nullopt
// when an arc is missing.
bool insertion_delta(const Instance& inst, const Route& route, std::size_t pos, int v,
                     double& delta) {
    const int pred = route.vertices[pos - 1];
    const int succ = route.vertices[pos];
    if (!inst.has_arc(pred, v) || !inst.has_arc(v, succ)) return false;
    delta = inst.arc_time(pred, v) + inst.arc_time(v, succ);
    if (inst.has_arc(pred, succ)) delta -= inst.arc_time(pred, succ);
    // pred->succ is consecutive in the route, so the arc exists whenever the
    // route is intact; guard anyway for partially built routes.
    return true;
}

bool removal_delta(const Instance& inst, const Route& route, std::size_t pos, double& delta) {
    const int pred = route.vertices[pos - 1];
    const int v = route.vertices[pos];
    const int succ = route.vertices[pos + 1];
    if (!inst.has_arc(pred, succ)) return false;  // removal would disconnect the route
    delta = inst.arc_time(pred, succ) - inst.arc_time(pred, v) - inst.arc_time(v, succ);
    return true;
}

void apply_insert(const Instance& inst, Solution& sol, int route_idx, std::size_t pos, int v,
                  double delta) {
    Route& route = sol.routes[route_idx];
    route.vertices.insert(route.vertices.begin() + pos, v);
    route.duration += delta;
    sol.total_time += delta;
    if (inst.profitable[v]) sol.profit_sum += inst.profit[v];
}

void apply_remove(const Instance& inst, Solution& sol, int route_idx, std::size_t pos,
                  double delta) {
    Route& route = sol.routes[route_idx];
    const int v = route.vertices[pos];
    route.vertices.erase(route.vertices.begin() + pos);
    route.duration += delta;
    sol.total_time += delta;
    if (inst.profitable[v]) sol.profit_sum -= inst.profit[v];
}

// Unvisited profitable vertices ordered by profit, direction drawn at random
// (ties by vertex id).
std::vector<int> ordered_unvisited(const Instance& inst, const Solution& sol, Rng& rng) {
    const std::vector<char> visited = sol.visited_mask(inst);
    std::vector<int> unvisited;
    for (int v = 0; v < inst.n; ++v) {
        if (inst.profitable[v] && !visited[v]) unvisited.push_back(v);
    }
    const bool descending = rng.coin_flip();
    std::stable_sort(unvisited.begin(), unvisited.end(), [&](int a, int b) {
        if (inst.profit[a] != inst.profit[b]) {
            return descending ? inst.profit[a] > inst.profit[b]
                              : inst.profit[a] < inst.profit[b];
        }
        return a < b;
    });
    return unvisited;
}

}  // namespace

bool better_solution(const Solution& a, const Solution& b) {
    if (a.profit_sum != b.profit_sum) return a.profit_sum > b.profit_sum;
    return a.total_time < b.total_time - kGainEps;
}

std::vector<std::vector<int>> solution_key(const Solution& sol) {
    std::vector<std::vector<int>> key;
    key.reserve(sol.routes.size());
    for (const Route& r : sol.routes) key.push_back(r.vertices);
    std::sort(key.begin(), key.end());
    return key;
}

bool Pool::contains(const Solution& sol) const {
    const auto key = solution_key(sol);
    for (const Solution& member : members_) {
        if (solution_key(member) == key) return true;
    }
    return false;
}

std::size_t Pool::best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < members_.size(); ++i) {
        if (better_solution(members_[i], members_[best])) best = i;
    }
    return best;
}

std::size_t Pool::worst_index() const {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < members_.size(); ++i) {
        if (better_solution(members_[worst], members_[i])) worst = i;
    }
    return worst;
}

const Solution& Pool::best() const { return members_[best_index()]; }
const Solution& Pool::worst() const { return members_[worst_index()]; }

bool Pool::try_add(const Solution& sol) {
    if (contains(sol)) return false;
    if (static_cast<int>(members_.size()) < capacity_) {
        members_.push_back(sol);
        return true;
    }
    const std::size_t worst = worst_index();
    if (better_solution(sol, members_[worst])) {
        members_[worst] = sol;
        return true;
    }
    return false;
}

Solution destroy(const Instance& inst, Solution sol, double removal_percentage, Rng& rng) {
    int visited_profitable = 0;
    for (const Route& r : sol.routes) {
        for (int v : r.vertices) {
            if (inst.profitable[v]) ++visited_profitable;
        }
    }
    if (visited_profitable == 0) return sol;

    // Integer draw from the open interval (0, pct * count).
    const int hi = static_cast<int>(std::ceil(removal_percentage * visited_profitable - 1e-9)) - 1;
    if (hi < 1) return sol;
    const int attempts = rng.uniform_int(1, hi);

    for (int attempt = 0; attempt < attempts; ++attempt) {
        // Pick a random visited interior vertex.
        std::vector<std::pair<int, std::size_t>> positions;
        for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
            const Route& r = sol.routes[ri];
            for (std::size_t k = 1; k + 1 < r.vertices.size(); ++k) {
                positions.push_back({static_cast<int>(ri), k});
            }
        }
        if (positions.empty()) break;
        const auto [ri, pos] = positions[rng.uniform_index(positions.size())];
        const int v = sol.routes[ri].vertices[pos];
        if (!inst.profitable[v]) continue;  // attempt consumed
        double delta;
        if (!removal_delta(inst, sol.routes[ri], pos, delta)) continue;
        if (sol.routes[ri].duration + delta > feasible_limit(inst)) continue;
        apply_remove(inst, sol, ri, pos, delta);
    }
    return sol;
}

bool greedy_insert(const Instance& inst, Solution& sol, Rng& rng, int only_route) {
    bool changed = false;
    for (int v : ordered_unvisited(inst, sol, rng)) {
        int best_route = -1;
        std::size_t best_pos = 0;
        double best_delta = 0.0;
        for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
            if (only_route >= 0 && static_cast<int>(ri) != only_route) continue;
            const Route& route = sol.routes[ri];
            for (std::size_t pos = 1; pos < route.vertices.size(); ++pos) {
                double delta;
                if (!insertion_delta(inst, route, pos, v, delta)) continue;
                if (route.duration + delta > feasible_limit(inst)) continue;
                if (best_route < 0 || delta < best_delta - kGainEps) {
                    best_route = static_cast<int>(ri);
                    best_pos = pos;
                    best_delta = delta;
                }
            }
        }
        if (best_route >= 0) {
            apply_insert(inst, sol, best_route, best_pos, v, best_delta);
            changed = true;
        }
    }
    return changed;
}

bool inter_route_exchange(const Instance& inst, Solution& sol, ExchangeKind kind) {
    const std::size_t num_routes = sol.routes.size();
    if (num_routes < 2) return false;
    const double limit = feasible_limit(inst);

    auto route_time_of = [&](const std::vector<int>& vertices, double& duration) {
        duration = 0.0;
        for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
            if (!inst.has_arc(vertices[k], vertices[k + 1])) return false;
            duration += inst.arc_time(vertices[k], vertices[k + 1]);
        }
        return true;
    };

    auto try_apply = [&](std::size_t ra, std::size_t rb, std::vector<int> va,
                         std::vector<int> vb) {
        double da, db;
        if (!route_time_of(va, da) || !route_time_of(vb, db)) return false;
        if (da > limit || db > limit) return false;
        const double old_total = sol.routes[ra].duration + sol.routes[rb].duration;
        if (da + db >= old_total - kGainEps) return false;
        sol.total_time += da + db - old_total;
        sol.routes[ra].vertices = std::move(va);
        sol.routes[ra].duration = da;
        sol.routes[rb].vertices = std::move(vb);
        sol.routes[rb].duration = db;
        return true;
    };

    for (std::size_t ra = 0; ra < num_routes; ++ra) {
        for (std::size_t rb = 0; rb < num_routes; ++rb) {
            if (ra == rb) continue;
            if (kind == ExchangeKind::OneOne && ra > rb) continue;  // symmetric scan
            const std::vector<int>& a = sol.routes[ra].vertices;
            const std::vector<int>& b = sol.routes[rb].vertices;
            if (kind == ExchangeKind::OneOne) {
                for (std::size_t i = 1; i + 1 < a.size(); ++i) {
                    for (std::size_t j = 1; j + 1 < b.size(); ++j) {
                        std::vector<int> va = a, vb = b;
                        std::swap(va[i], vb[j]);
                        if (try_apply(ra, rb, std::move(va), std::move(vb))) return true;
                    }
                }
            } else if (kind == ExchangeKind::OneZero) {
                for (std::size_t i = 1; i + 1 < a.size(); ++i) {
                    for (std::size_t p = 1; p < b.size(); ++p) {
                        std::vector<int> va = a, vb = b;
                        const int v = va[i];
                        va.erase(va.begin() + i);
                        vb.insert(vb.begin() + p, v);
                        if (try_apply(ra, rb, std::move(va), std::move(vb))) return true;
                    }
                }
            } else {
                for (std::size_t i = 1; i + 2 < a.size(); ++i) {
                    for (std::size_t j = 1; j + 1 < b.size(); ++j) {
                        // Adjacent pair a[i], a[i+1] trades places with b[j].
                        std::vector<int> va = a, vb = b;
                        const int u1 = va[i], u2 = va[i + 1];
                        const int w = vb[j];
                        va.erase(va.begin() + i, va.begin() + i + 2);
                        va.insert(va.begin() + i, w);
                        vb[j] = u1;
                        vb.insert(vb.begin() + j + 1, u2);
                        if (try_apply(ra, rb, std::move(va), std::move(vb))) return true;
                    }
                }
            }
        }
    }
    return false;
}

namespace {

// Candidate route from reassembling segments; empty when an arc is missing.
bool sequence_duration(const Instance& inst, const std::vector<int>& vertices, double& duration) {
    duration = 0.0;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
        if (!inst.has_arc(vertices[k], vertices[k + 1])) return false;
        duration += inst.arc_time(vertices[k], vertices[k + 1]);
    }
    return true;
}

void append_segment(std::vector<int>& out, const std::vector<int>& route, int from, int to,
                    bool reversed) {
    if (reversed) {
        for (int k = to; k >= from; --k) out.push_back(route[k]);
    } else {
        for (int k = from; k <= to; ++k) out.push_back(route[k]);
    }
}

}  // namespace

bool three_opt(const Instance& inst, Route& route) {
    bool improved_any = false;
    const int len = static_cast<int>(route.vertices.size());
    if (len < 3) return false;

    bool improved = true;
    while (improved) {
        improved = false;
        const std::vector<int>& v = route.vertices;
        const int arcs = static_cast<int>(v.size()) - 1;
        double best_duration = route.duration;
        std::vector<int> best_vertices;

        auto consider = [&](const std::vector<int>& candidate) {
            double duration;
            if (!sequence_duration(inst, candidate, duration)) return;
            if (duration < best_duration - kGainEps) {
                best_duration = duration;
                best_vertices = candidate;
            }
        };

        // Two cuts: reverse the middle segment.
        for (int p = 0; p + 1 < arcs; ++p) {
            for (int q = p + 1; q < arcs; ++q) {
                std::vector<int> candidate;
                candidate.reserve(v.size());
                append_segment(candidate, v, 0, p, false);
                append_segment(candidate, v, p + 1, q, true);
                append_segment(candidate, v, q + 1, arcs, false);
                consider(candidate);
            }
        }
        // Three cuts: middle segments swapped and/or reversed.
        for (int p = 0; p + 2 < arcs; ++p) {
            for (int q = p + 1; q + 1 < arcs; ++q) {
                for (int r = q + 1; r < arcs; ++r) {
                    for (int pattern = 1; pattern < 8; ++pattern) {
                        const bool swap_bc = pattern & 4;
                        const bool rev_first = pattern & 2;
                        const bool rev_second = pattern & 1;
                        if (!swap_bc && !rev_first && !rev_second) continue;
                        std::vector<int> candidate;
                        candidate.reserve(v.size());
                        append_segment(candidate, v, 0, p, false);
                        if (!swap_bc) {
                            append_segment(candidate, v, p + 1, q, rev_first);
                            append_segment(candidate, v, q + 1, r, rev_second);
                        } else {
                            append_segment(candidate, v, q + 1, r, rev_first);
                            append_segment(candidate, v, p + 1, q, rev_second);
                        }
                        append_segment(candidate, v, r + 1, arcs, false);
                        consider(candidate);
                    }
                }
            }
        }

        if (!best_vertices.empty()) {
            route.vertices = std::move(best_vertices);
            route.duration = best_duration;
            improved = true;
            improved_any = true;
        }
    }
    return improved_any;
}

bool unvisited_replace(const Instance& inst, Solution& sol, ReplaceKind kind, Rng& rng) {
    const double limit = feasible_limit(inst);
    for (int u : ordered_unvisited(inst, sol, rng)) {
        for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
            Route& route = sol.routes[ri];
            const std::size_t len = route.vertices.size();
            if (kind == ReplaceKind::OneOne) {
                for (std::size_t i = 1; i + 1 < len; ++i) {
                    const int v = route.vertices[i];
                    if (!inst.profitable[v]) continue;
                    const int pred = route.vertices[i - 1];
                    const int succ = route.vertices[i + 1];
                    if (!inst.has_arc(pred, u) || !inst.has_arc(u, succ)) continue;
                    const double delta = inst.arc_time(pred, u) + inst.arc_time(u, succ) -
                                         inst.arc_time(pred, v) - inst.arc_time(v, succ);
                    if (route.duration + delta > limit) continue;
                    const long long profit_gain = inst.profit[u] - inst.profit[v];
                    if (profit_gain > 0 || (profit_gain == 0 && delta < -kGainEps)) {
                        route.vertices[i] = u;
                        route.duration += delta;
                        sol.total_time += delta;
                        sol.profit_sum += profit_gain;
                        return true;
                    }
                }
            } else {
                for (std::size_t i = 1; i + 2 < len; ++i) {
                    const int v1 = route.vertices[i];
                    const int v2 = route.vertices[i + 1];
                    if (!inst.profitable[v1] || !inst.profitable[v2]) continue;
                    const int pred = route.vertices[i - 1];
                    const int succ = route.vertices[i + 2];
                    if (!inst.has_arc(pred, u) || !inst.has_arc(u, succ)) continue;
                    const double delta = inst.arc_time(pred, u) + inst.arc_time(u, succ) -
                                         inst.arc_time(pred, v1) - inst.arc_time(v1, v2) -
                                         inst.arc_time(v2, succ);
                    if (route.duration + delta > limit) continue;
                    const long long profit_gain =
                        inst.profit[u] - inst.profit[v1] - inst.profit[v2];
                    if (profit_gain > 0 || (profit_gain == 0 && delta < -kGainEps)) {
                        route.vertices.erase(route.vertices.begin() + i,
                                             route.vertices.begin() + i + 2);
                        route.vertices.insert(route.vertices.begin() + i, u);
                        route.duration += delta;
                        sol.total_time += delta;
                        sol.profit_sum += profit_gain;
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

namespace {

// Inter-route exchanges until exhausted, then per-route 3-opt; repeat while
// the intra stage keeps improving.
bool inter_intra_improvements(const Instance& inst, Solution& sol) {
    bool improved_any = false;
    bool intra_improved = true;
    while (intra_improved) {
        bool inter_improved = true;
        while (inter_improved) {
            inter_improved = false;
            inter_improved |= inter_route_exchange(inst, sol, ExchangeKind::OneOne);
            inter_improved |= inter_route_exchange(inst, sol, ExchangeKind::OneZero);
            inter_improved |= inter_route_exchange(inst, sol, ExchangeKind::TwoOne);
            improved_any |= inter_improved;
        }
        intra_improved = false;
        for (Route& route : sol.routes) {
            const double before = route.duration;
            if (three_opt(inst, route)) {
                sol.total_time += route.duration - before;
                intra_improved = true;
            }
        }
        improved_any |= intra_improved;
    }
    return improved_any;
}

bool vertex_replacements(const Instance& inst, Solution& sol, Rng& rng) {
    bool improved_any = false;
    bool improved = true;
    while (improved) {
        improved = false;
        improved |= unvisited_replace(inst, sol, ReplaceKind::OneOne, rng);
        improved |= unvisited_replace(inst, sol, ReplaceKind::TwoOne, rng);
        improved_any |= improved;
    }
    return improved_any;
}

}  // namespace

void local_search(const Instance& inst, Solution& sol, Rng& rng) {
    bool improved = true;
    while (improved) {
        improved = false;
        improved |= inter_intra_improvements(inst, sol);
        improved |= greedy_insert(inst, sol, rng);
        improved |= vertex_replacements(inst, sol, rng);
        improved |= greedy_insert(inst, sol, rng);
    }
}

bool shift_perturbation(const Instance& inst, Solution& sol, Rng& rng) {
    if (sol.routes.size() < 2) return false;
    const double limit = feasible_limit(inst);
    const Solution reference = sol;
    bool moved_any = false;

    for (std::size_t ra = 0; ra < reference.routes.size(); ++ra) {
        const Route& ref_route = reference.routes[ra];
        bool moved_from_route = false;
        for (std::size_t k = 1; k + 1 < ref_route.vertices.size(); ++k) {
            const int v = ref_route.vertices[k];
            // Locate v in the working copy; it stays in route ra until moved.
            Route& src = sol.routes[ra];
            auto it = std::find(src.vertices.begin() + 1, src.vertices.end() - 1, v);
            if (it == src.vertices.end() - 1) continue;
            const std::size_t pos = static_cast<std::size_t>(it - src.vertices.begin());
            double out_delta;
            if (!removal_delta(inst, src, pos, out_delta)) continue;
            if (src.duration + out_delta > limit) continue;

            int best_route = -1;
            std::size_t best_pos = 0;
            double best_delta = 0.0;
            for (std::size_t rb = 0; rb < sol.routes.size(); ++rb) {
                if (rb == ra) continue;
                const Route& dst = sol.routes[rb];
                for (std::size_t p = 1; p < dst.vertices.size(); ++p) {
                    double delta;
                    if (!insertion_delta(inst, dst, p, v, delta)) continue;
                    if (dst.duration + delta > limit) continue;
                    if (best_route < 0 || delta < best_delta - kGainEps) {
                        best_route = static_cast<int>(rb);
                        best_pos = p;
                        best_delta = delta;
                    }
                }
            }
            if (best_route < 0) continue;
            apply_remove(inst, sol, static_cast<int>(ra), pos, out_delta);
            // Removal updated profit bookkeeping; the insertion restores it.
            apply_insert(inst, sol, best_route, best_pos, v, best_delta);
            moved_from_route = true;
            moved_any = true;
        }
        if (moved_from_route) {
            greedy_insert(inst, sol, rng, static_cast<int>(ra));
        }
    }
    return moved_any;
}

Solution path_between(const Instance& inst, const Solution& start, const Solution& guide,
                      Rng& rng) {
    Solution best = start;
    Solution current = start;
    const double limit = feasible_limit(inst);

    const std::vector<char> in_start = start.visited_mask(inst);
    const std::vector<char> in_guide = guide.visited_mask(inst);
    std::vector<int> to_add;
    for (int v = 0; v < inst.n; ++v) {
        if (in_guide[v] && !in_start[v]) to_add.push_back(v);
    }
    const bool descending = rng.coin_flip();
    std::stable_sort(to_add.begin(), to_add.end(), [&](int a, int b) {
        if (inst.profit[a] != inst.profit[b]) {
            return descending ? inst.profit[a] > inst.profit[b] : inst.profit[a] < inst.profit[b];
        }
        return a < b;
    });

    std::size_t next = 0;
    while (next < to_add.size()) {
        auto any_feasible_route = [&]() {
            for (const Route& r : current.routes) {
                if (r.duration <= limit) return true;
            }
            return false;
        };
        while (next < to_add.size() && any_feasible_route()) {
            const int v = to_add[next++];
            int best_route = -1;
            std::size_t best_pos = 0;
            double best_delta = 0.0;
            for (std::size_t ri = 0; ri < current.routes.size(); ++ri) {
                const Route& route = current.routes[ri];
                if (route.duration > limit) continue;  // infeasible routes closed to insertions
                for (std::size_t p = 1; p < route.vertices.size(); ++p) {
                    double delta;
                    if (!insertion_delta(inst, route, p, v, delta)) continue;
                    if (best_route < 0 || delta < best_delta - kGainEps) {
                        best_route = static_cast<int>(ri);
                        best_pos = p;
                        best_delta = delta;
                    }
                }
            }
            if (best_route >= 0) {
                apply_insert(inst, current, best_route, best_pos, v, best_delta);
            }
        }

        // Restore feasibility: strip cheapest profitable vertices first.
        for (std::size_t ri = 0; ri < current.routes.size(); ++ri) {
            Route& route = current.routes[ri];
            bool stuck = false;
            while (route.duration > limit && !stuck) {
                int drop_pos = -1;
                int drop_profit = 0;
                double drop_delta = 0.0;
                for (std::size_t k = 1; k + 1 < route.vertices.size(); ++k) {
                    const int v = route.vertices[k];
                    if (!inst.profitable[v]) continue;
                    double delta;
                    if (!removal_delta(inst, route, k, delta)) continue;  // would disconnect
                    if (drop_pos < 0 || inst.profit[v] < drop_profit) {
                        drop_pos = static_cast<int>(k);
                        drop_profit = inst.profit[v];
                        drop_delta = delta;
                    }
                }
                if (drop_pos < 0) {
                    stuck = true;  // nothing removable; abandon this waypoint
                } else {
                    apply_remove(inst, current, static_cast<int>(ri), drop_pos, drop_delta);
                }
            }
            if (stuck) return best;
        }

        local_search(inst, current, rng);
        if (better_solution(current, best)) best = current;
    }
    return best;
}

void path_relinking(const Instance& inst, Pool& pool, const Solution& y, double eps2, Rng& rng) {
    Solution best = y;
    const std::vector<char> y_mask = y.visited_mask(inst);
    const int ny = y.visited_count();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const Solution& x = pool.at(i);
        const std::vector<char> x_mask = x.visited_mask(inst);
        int common = 0;
        for (int v = 0; v < inst.n; ++v) common += (x_mask[v] && y_mask[v]);
        const int nx = x.visited_count();
        const double similarity =
            nx + ny > 0 ? (2.0 * common) / static_cast<double>(nx + ny) : 1.0;
        if (similarity < eps2) {
            Solution forward = path_between(inst, y, x, rng);
            if (better_solution(forward, best)) best = std::move(forward);
            Solution backward = path_between(inst, x, y, rng);
            if (better_solution(backward, best)) best = std::move(backward);
        }
    }
    pool.try_add(best);
}

LnsResult lns_run(const Instance& inst, const Solution& initial, const LnsConfig& cfg, Rng& rng) {
    {
        const ValidationReport report = validate_solution(inst, initial);
        if (!report.feasible) {
            throw std::invalid_argument("lns_run: initial solution is infeasible");
        }
    }
    LnsResult result;
    Solution seed = initial;
    local_search(inst, seed, rng);
    Pool pool(cfg.max_pool_size);
    pool.try_add(seed);

    int stalling_counter = 0;
    for (int iteration = 1; iteration <= cfg.max_iter; ++iteration) {
        Solution current = pool.at(rng.uniform_index(pool.size()));
        current = destroy(inst, std::move(current), cfg.removal_percentage, rng);

        bool shifting = true;
        while (shifting) {
            local_search(inst, current, rng);
            if (better_solution(current, pool.best())) {
                stalling_counter = -1;
                pool.try_add(current);
            }
            shifting = shift_perturbation(inst, current, rng);
        }

        if (better_solution(current, pool.best())) {
            stalling_counter = 0;
        } else {
            ++stalling_counter;
        }
        if (stalling_counter >= cfg.stalling_limit) {
            if (cfg.stop_on_stall) {
                result.trace.push_back(LnsTraceRecord{iteration, pool.best().profit_sum,
                                                      static_cast<int>(pool.size()),
                                                      result.pr_calls});
                break;
            }
            path_relinking(inst, pool, current, cfg.similarity_limit, rng);
            ++result.pr_calls;
            stalling_counter = 0;
        }
        pool.try_add(current);
        result.trace.push_back(LnsTraceRecord{iteration, pool.best().profit_sum,
                                              static_cast<int>(pool.size()), result.pr_calls});
    }
    result.best = pool.best();
    return result;
}

}  // namespace stop
