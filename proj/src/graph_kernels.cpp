#include "stop/graph_kernels.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <stdexcept>

namespace stop {

namespace {

constexpr double kFlowEps = 1e-12;

struct FlowEdge {
    int to;
    double cap;   // remaining capacity
    int rev;      // index of the reverse edge in adj[to]
    int orig_id;  // input arc index, -1 for reverse edges
};

class PushRelabel {
public:
    PushRelabel(int n) : n_(n), adj_(n) {}

    void add_arc(int from, int to, double cap, int orig_id) {
        adj_[from].push_back(FlowEdge{to, cap, static_cast<int>(adj_[to].size()), orig_id});
        adj_[to].push_back(FlowEdge{from, 0.0, static_cast<int>(adj_[from].size()) - 1, -1});
    }

    double run(int source, int sink) {
        height_.assign(n_, 0);
        excess_.assign(n_, 0.0);
        current_.assign(n_, 0);
        height_[source] = n_;
        for (FlowEdge& e : adj_[source]) {
            if (e.cap > kFlowEps) {
                adj_[e.to][e.rev].cap += e.cap;
                excess_[e.to] += e.cap;
                e.cap = 0.0;
            }
        }
        std::queue<int> active;
        std::vector<char> in_queue(n_, 0);
        for (int v = 0; v < n_; ++v) {
            if (v != source && v != sink && excess_[v] > kFlowEps) {
                active.push(v);
                in_queue[v] = 1;
            }
        }
        while (!active.empty()) {
            const int v = active.front();
            active.pop();
            in_queue[v] = 0;
            discharge(v, source, sink, active, in_queue);
        }
        return excess_[sink];
    }

    std::vector<char> residual_reachable(int source) const {
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{source};
        seen[source] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const FlowEdge& e : adj_[v]) {
                if (e.cap > kFlowEps && !seen[e.to]) {
                    seen[e.to] = 1;
                    stack.push_back(e.to);
                }
            }
        }
        return seen;
    }

    // Flow on each original arc = reverse edge's accumulated capacity.
    void collect_flows(std::vector<double>& arc_flow) const {
        for (int v = 0; v < n_; ++v) {
            for (const FlowEdge& e : adj_[v]) {
                if (e.orig_id >= 0) {
                    arc_flow[e.orig_id] = adj_[e.to][e.rev].cap;
                }
            }
        }
    }

private:
    void discharge(int v, int source, int sink, std::queue<int>& active,
                   std::vector<char>& in_queue) {
        while (excess_[v] > kFlowEps) {
            if (current_[v] == static_cast<int>(adj_[v].size())) {
                relabel(v);
                current_[v] = 0;
                if (height_[v] >= 2 * n_) return;
                continue;
            }
            FlowEdge& e = adj_[v][current_[v]];
            if (e.cap > kFlowEps && height_[v] == height_[e.to] + 1) {
                const double delta = std::min(excess_[v], e.cap);
                e.cap -= delta;
                adj_[e.to][e.rev].cap += delta;
                excess_[v] -= delta;
                excess_[e.to] += delta;
                if (e.to != source && e.to != sink && !in_queue[e.to]) {
                    active.push(e.to);
                    in_queue[e.to] = 1;
                }
            } else {
                ++current_[v];
            }
        }
    }

    void relabel(int v) {
        int best = 2 * n_;
        for (const FlowEdge& e : adj_[v]) {
            if (e.cap > kFlowEps) best = std::min(best, height_[e.to] + 1);
        }
        height_[v] = best;
    }

    int n_;
    std::vector<std::vector<FlowEdge>> adj_;
    std::vector<int> height_;
    std::vector<double> excess_;
    std::vector<int> current_;
};

}  // namespace

MaxFlowResult max_flow(const CapacitatedDigraph& g, int source, int sink) {
    if (source == sink) throw std::invalid_argument("max_flow: source equals sink");
    PushRelabel solver(g.n);
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
        const CapArc& arc = g.arcs[a];
        if (arc.capacity < 0.0) throw std::invalid_argument("max_flow: negative capacity");
        solver.add_arc(arc.from, arc.to, arc.capacity, static_cast<int>(a));
    }
    MaxFlowResult result;
    result.flow_value = solver.run(source, sink);
    result.source_side = solver.residual_reachable(source);
    result.arc_flow.assign(g.arcs.size(), 0.0);
    solver.collect_flows(result.arc_flow);
    return result;
}

namespace {

void expand_clique(const std::vector<std::vector<char>>& adj, std::vector<int>& r,
                   std::vector<int> p, std::vector<int> x, CliqueEnumeration& out,
                   std::size_t max_cliques) {
    if (out.truncated) return;
    if (p.empty() && x.empty()) {
        if (out.cliques.size() >= max_cliques) {
            out.truncated = true;
            return;
        }
        out.cliques.push_back(r);
        return;
    }
    // Pivot on the vertex of P∪X covering the most of P.
    int pivot = -1, best_cover = -1;
    for (int u : p) {
        int cover = 0;
        for (int v : p) cover += adj[u][v];
        if (cover > best_cover) {
            best_cover = cover;
            pivot = u;
        }
    }
    for (int u : x) {
        int cover = 0;
        for (int v : p) cover += adj[u][v];
        if (cover > best_cover) {
            best_cover = cover;
            pivot = u;
        }
    }
    std::vector<int> candidates;
    for (int v : p) {
        if (pivot < 0 || !adj[pivot][v]) candidates.push_back(v);
    }
    for (int v : candidates) {
        std::vector<int> p_next, x_next;
        for (int w : p) {
            if (adj[v][w]) p_next.push_back(w);
        }
        for (int w : x) {
            if (adj[v][w]) x_next.push_back(w);
        }
        r.push_back(v);
        expand_clique(adj, r, std::move(p_next), std::move(x_next), out, max_cliques);
        r.pop_back();
        if (out.truncated) return;
        p.erase(std::find(p.begin(), p.end(), v));
        x.push_back(v);
    }
}

}  // namespace

CliqueEnumeration maximal_cliques(const UndirectedGraph& g, std::size_t max_cliques) {
    std::vector<std::vector<char>> adj(g.n, std::vector<char>(g.n, 0));
    for (const auto& [a, b] : g.edges) {
        if (a == b) throw std::invalid_argument("maximal_cliques: self-loop");
        adj[a][b] = adj[b][a] = 1;
    }
    CliqueEnumeration out;
    std::vector<int> r;
    std::vector<int> p(g.n), x;
    for (int v = 0; v < g.n; ++v) p[v] = v;
    expand_clique(adj, r, std::move(p), std::move(x), out, max_cliques);
    for (std::vector<int>& clique : out.cliques) std::sort(clique.begin(), clique.end());
    std::sort(out.cliques.begin(), out.cliques.end());
    return out;
}

KnapsackResult knapsack_max(const std::vector<long long>& values,
                            const std::vector<long long>& weights, long long capacity) {
    if (values.size() != weights.size()) {
        throw std::invalid_argument("knapsack_max: size mismatch");
    }
    KnapsackResult result;
    if (capacity < 0) return result;
    const int n = static_cast<int>(values.size());
    const std::size_t width = static_cast<std::size_t>(capacity) + 1;
    std::vector<long long> dp(width, 0);
    std::vector<std::vector<char>> take(n, std::vector<char>(width, 0));
    for (int i = 0; i < n; ++i) {
        if (weights[i] < 0) throw std::invalid_argument("knapsack_max: negative weight");
        if (weights[i] > capacity || values[i] <= 0) continue;
        for (long long w = capacity; w >= weights[i]; --w) {
            const long long candidate = dp[w - weights[i]] + values[i];
            if (candidate > dp[w]) {
                dp[w] = candidate;
                take[i][w] = 1;
            }
        }
    }
    result.best_value = dp[capacity];
    long long w = capacity;
    for (int i = n - 1; i >= 0; --i) {
        if (take[i][w]) {
            result.chosen.push_back(i);
            w -= weights[i];
        }
    }
    std::reverse(result.chosen.begin(), result.chosen.end());
    return result;
}

}  // namespace stop
