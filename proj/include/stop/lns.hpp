#ifndef STOP_LNS_HPP
#define STOP_LNS_HPP

#include <vector>

#include "stop/instance.hpp"
#include "stop/rng.hpp"

namespace stop {

struct LnsConfig {
    int max_iter = 5000;
    int max_pool_size = 20;
    int stalling_limit = 100;
    double removal_percentage = 0.75;
    double similarity_limit = 0.9;  // epsilon_2 for path relinking
    bool stop_on_stall = false;     // halt at the stalling limit, PR disabled
};

// A is better than B on strictly greater profit; ties on strictly smaller
// total time.
bool better_solution(const Solution& a, const Solution& b);

// Elite solutions, deduplicated by route multiset; the worst member is
// evicted when a better candidate arrives at capacity.
class Pool {
public:
    explicit Pool(int capacity) : capacity_(capacity) {}

    // Spec contract: reject members, append below capacity, otherwise
    // replace the worst when the candidate beats it.
    bool try_add(const Solution& sol);

    bool contains(const Solution& sol) const;
    const Solution& best() const;
    const Solution& worst() const;
    const Solution& at(std::size_t i) const { return members_[i]; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

private:
    std::size_t best_index() const;
    std::size_t worst_index() const;

    int capacity_;
    std::vector<Solution> members_;
};

std::vector<std::vector<int>> solution_key(const Solution& sol);

enum class ExchangeKind { OneOne, OneZero, TwoOne };
enum class ReplaceKind { OneOne, TwoOne };

// Random removal attempts bounded by a draw in the open interval
// (0, pct * visited profitable count). Mandatory vertices survive.
Solution destroy(const Instance& inst, Solution sol, double removal_percentage, Rng& rng);

// Insertion sweep over the unvisited profitable vertices in a random profit
// order; each lands at the feasible spot of least duration increase.
// only_route restricts the candidate routes. Returns true when anything
// was inserted.
bool greedy_insert(const Instance& inst, Solution& sol, Rng& rng, int only_route = -1);

// First time-saving exchange between two routes, scanning front to back.
bool inter_route_exchange(const Instance& inst, Solution& sol, ExchangeKind kind);

// Best-improvement 3-opt on one route; every reconnection is checked for arc
// existence before evaluation. Returns true when the duration decreased.
bool three_opt(const Instance& inst, Route& route);

// First replacement of visited profitable vertices with an unvisited one
// that raises profit, or saves time at equal profit.
bool unvisited_replace(const Instance& inst, Solution& sol, ReplaceKind kind, Rng& rng);

// Local-search stack: inter/intra-route improvements, insertions,
// replacements, insertions, repeated to a fixed point.
void local_search(const Instance& inst, Solution& sol, Rng& rng);

// Moves each vertex of the reference copy to the route of least duration
// increase, then refills the emptied routes. Returns true when at least one
// vertex was relocated.
bool shift_perturbation(const Instance& inst, Solution& sol, Rng& rng);

// Intermediate solutions on the path from start toward guide: insert the
// guide's extra vertices (infeasibility allowed), restore by cheapest-profit
// removals, local-search each waypoint, keep the best.
Solution path_between(const Instance& inst, const Solution& start, const Solution& guide,
                      Rng& rng);

// Relinks Y against every sufficiently dissimilar pool member, both
// directions, and offers the best to the pool.
void path_relinking(const Instance& inst, Pool& pool, const Solution& y, double eps2, Rng& rng);

struct LnsTraceRecord {
    int iteration = 0;
    long long best_profit = 0;
    int pool_size = 0;
    int pr_calls = 0;
};

struct LnsResult {
    Solution best;
    std::vector<LnsTraceRecord> trace;
    int pr_calls = 0;
};

LnsResult lns_run(const Instance& inst, const Solution& initial, const LnsConfig& cfg, Rng& rng);

}  // namespace stop

#endif
