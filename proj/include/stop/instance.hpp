#ifndef STOP_INSTANCE_HPP
#define STOP_INSTANCE_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace stop {

// Absolute tolerance for time comparisons. Profits are exact integers.
inline constexpr double kTimeEps = 1e-6;

struct Arc {
    int from = -1;
    int to = -1;
    double time = 0.0;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// A STOP instance: digraph with origin s, destination t, mandatory set S,
// profitable set P with integer rewards, arc traverse times, fleet size m
// and route duration limit T. Vertex ids are dense 0..n-1; orig_id maps
// back to the position in the parsed file for reporting.
class Instance {
public:
    int n = 0;
    int s = 0;
    int t = 1;
    int fleet_size = 1;
    double time_limit = 0.0;

    std::vector<char> mandatory;   // size n
    std::vector<char> profitable;  // size n
    std::vector<int> profit;       // size n, zero outside P

    bool has_coords = false;
    std::vector<Point> coords;

    std::vector<Arc> arcs;
    std::vector<int> orig_id;

    std::string name;

    void init(int num_vertices);
    void rebuild_adjacency();

    int arc_id(int i, int j) const { return lookup_[static_cast<std::size_t>(i) * n + j]; }
    bool has_arc(int i, int j) const { return arc_id(i, j) >= 0; }
    double arc_time(int i, int j) const { return arcs[arc_id(i, j)].time; }

    const std::vector<int>& out_arcs(int i) const { return out_[i]; }
    const std::vector<int>& in_arcs(int i) const { return in_[i]; }

    int num_arcs() const { return static_cast<int>(arcs.size()); }
    bool is_interior(int v) const { return v != s && v != t; }

private:
    std::vector<int> lookup_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

// All-pairs minimum traverse times. Unreachable entries are IEEE +infinity,
// which propagates through sums without overflow.
class RMatrix {
public:
    RMatrix() = default;
    explicit RMatrix(int n)
        : n_(n), d_(static_cast<std::size_t>(n) * n, std::numeric_limits<double>::infinity()) {
        for (int i = 0; i < n; ++i) at(i, i) = 0.0;
    }

    double& at(int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    bool reachable(int i, int j) const { return std::isfinite(at(i, j)); }
    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<double> d_;
};

struct Route {
    std::vector<int> vertices;  // begins at s, ends at t
    double duration = 0.0;
};

struct Solution {
    std::vector<Route> routes;
    long long profit_sum = 0;
    double total_time = 0.0;

    // Recomputes cached durations and the profit/time totals.
    void refresh(const Instance& inst);
    std::vector<char> visited_mask(const Instance& inst) const;
    int visited_count() const;
};

enum class ViolationKind {
    TimeLimit,
    MissingMandatory,
    DuplicateVisit,
    MissingArc,
    TooManyRoutes,
    BadTerminal,
};

struct Violation {
    ViolationKind kind;
    std::string detail;
};

struct ValidationReport {
    bool feasible = true;
    std::vector<Violation> violations;
};

enum class ExecPolicy { Serial, OpenMP };

struct PreprocessResult {
    Instance instance;
    RMatrix r;
    bool provably_infeasible = false;
    std::vector<int> pruned_mandatory;  // original ids
};

// Completes the digraph with Euclidean traverse times in both directions.
void build_graph(Instance& inst);

// Floyd-Warshall over the instance arcs.
RMatrix shortest_times(const Instance& inst, ExecPolicy policy = ExecPolicy::Serial);

// Removes vertices and arcs that no route of duration <= T can use, plus all
// arcs entering s and leaving t, iterating until a fixed point. Flags the
// instance provably infeasible when a mandatory vertex is pruned.
PreprocessResult preprocess(const Instance& inst, const RMatrix& r);

double route_time(const Instance& inst, const Route& route);
long long route_profit(const Instance& inst, const Route& route);

ValidationReport validate_solution(const Instance& inst, const Solution& sol);

}  // namespace stop

#endif
