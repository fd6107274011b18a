#ifndef STOP_GRAPH_KERNELS_HPP
#define STOP_GRAPH_KERNELS_HPP

#include <cstdint>
#include <vector>

namespace stop {

struct CapArc {
    int from = 0;
    int to = 0;
    double capacity = 0.0;
};

struct CapacitatedDigraph {
    int n = 0;
    std::vector<CapArc> arcs;
};

struct MaxFlowResult {
    double flow_value = 0.0;
    std::vector<char> source_side;  // size n; the cut side containing the source
    std::vector<double> arc_flow;   // parallel to the input arc list
};

// Goldberg-Tarjan preflow push-relabel. Capacities must be nonnegative and
// finite. source_side is the set of vertices reachable from the source in
// the final residual network.
MaxFlowResult max_flow(const CapacitatedDigraph& g, int source, int sink);

struct UndirectedGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // no self-loops
};

struct CliqueEnumeration {
    std::vector<std::vector<int>> cliques;  // each sorted ascending
    bool truncated = false;
};

// All maximal cliques (isolated vertices as singletons), Tomita-style pivot
// depth-first search. Enumeration stops with truncated=true once max_cliques
// have been collected.
CliqueEnumeration maximal_cliques(const UndirectedGraph& g, std::size_t max_cliques = 100000);

struct KnapsackResult {
    long long best_value = 0;
    std::vector<int> chosen;  // indices, ascending
};

// Exact 0-1 knapsack by dynamic programming over capacities.
KnapsackResult knapsack_max(const std::vector<long long>& values,
                            const std::vector<long long>& weights, long long capacity);

}  // namespace stop

#endif
