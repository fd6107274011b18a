#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "stop/lns.hpp"

using namespace stop;

namespace {

Solution make_solution(const Instance& inst, std::vector<std::vector<int>> routes) {
    Solution sol;
    for (auto& r : routes) sol.routes.push_back(Route{std::move(r), 0.0});
    sol.refresh(inst);
    return sol;
}

// Line instance: vertices 0..n-1 at x = 0,1,...,n-1, complete digraph.
Instance line_instance(int n, double tmax, int fleet = 1) {
    Instance inst;
    inst.init(n);
    inst.s = 0;
    inst.t = n - 1;
    inst.fleet_size = fleet;
    inst.time_limit = tmax;
    inst.has_coords = true;
    for (int v = 0; v < n; ++v) {
        inst.coords[v] = Point{static_cast<double>(v), 0.0};
        if (v != 0 && v != n - 1) {
            inst.profitable[v] = 1;
            inst.profit[v] = 1;
        }
    }
    build_graph(inst);
    return inst;
}

}  // namespace

TEST_CASE("pool: membership, capacity and eviction") {
    const Instance inst = line_instance(5, 10.0, 2);
    Pool pool(2);
    const Solution a = make_solution(inst, {{0, 1, 4}});
    const Solution b = make_solution(inst, {{0, 2, 4}});
    const Solution ab = make_solution(inst, {{0, 1, 2, 4}});

    CHECK(pool.try_add(a));           // below capacity: appended
    CHECK_FALSE(pool.try_add(a));     // duplicate rejected
    CHECK(pool.try_add(b));           // still below capacity
    CHECK(pool.size() == 2);
    const Solution worse = make_solution(inst, {{0, 4}});
    CHECK_FALSE(pool.try_add(worse));  // full and worse than the worst
    CHECK(pool.try_add(ab));           // better: evicts the worst
    CHECK(pool.size() == 2);
    CHECK(pool.best().profit_sum == 2);
}

TEST_CASE("better_solution: profit first, then strictly smaller time") {
    const Instance inst = line_instance(6, 20.0, 2);
    const Solution two = make_solution(inst, {{0, 1, 2, 5}});
    const Solution slow = make_solution(inst, {{0, 1, 3, 5}});  // same profit, longer
    CHECK(better_solution(two, slow));
    CHECK_FALSE(better_solution(slow, two));
    CHECK_FALSE(better_solution(two, two));
}

TEST_CASE("destroy: nothing to remove leaves the solution alone") {
    Instance inst = line_instance(4, 10.0);
    inst.mandatory[1] = 1;
    inst.profitable[1] = 0;
    inst.profit[1] = 0;
    const Solution sol = make_solution(inst, {{0, 1, 3}});
    Rng rng(1);
    const Solution after = destroy(inst, sol, 0.75, rng);
    CHECK(after.routes[0].vertices == sol.routes[0].vertices);
}

TEST_CASE("destroy: attempt counts come from the open interval") {
    // Four visited profitable vertices at pct 0.75: between 1 and 2 removals,
    // and both counts occur across seeds.
    const Instance inst = line_instance(6, 20.0);
    const Solution sol = make_solution(inst, {{0, 1, 2, 3, 4, 5}});
    bool saw_one = false, saw_two = false;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed);
        const Solution after = destroy(inst, sol, 0.75, rng);
        CHECK(validate_solution(inst, after).feasible);
        const int removed = sol.visited_count() - after.visited_count();
        CHECK(removed >= 1);  // every attempt lands on a removable profitable vertex
        CHECK(removed <= 2);
        saw_one |= removed == 1;
        saw_two |= removed == 2;
        CHECK(after.profit_sum <= sol.profit_sum);
    }
    CHECK(saw_one);
    CHECK(saw_two);
}

TEST_CASE("destroy: mandatory vertices survive, attempts are consumed") {
    Instance inst = line_instance(6, 20.0);
    inst.mandatory[2] = 1;
    inst.profitable[2] = 0;
    inst.profit[2] = 0;
    const Solution sol = make_solution(inst, {{0, 1, 2, 3, 4, 5}});
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        const Solution after = destroy(inst, sol, 0.75, rng);
        bool has_mandatory = false;
        for (int v : after.routes[0].vertices) has_mandatory |= v == 2;
        CHECK(has_mandatory);
        CHECK(validate_solution(inst, after).feasible);
    }
}

TEST_CASE("greedy_insert: least-increase position wins") {
    // v=1 can slot into route A (detour 4) or route B (detour 2).
    Instance inst;
    inst.init(5);  // s v a b t
    inst.s = 0;
    inst.t = 4;
    inst.fleet_size = 2;
    inst.time_limit = 20.0;
    inst.profitable[1] = 1;
    inst.profit[1] = 3;
    inst.profitable[2] = inst.profitable[3] = 1;
    inst.arcs = {{0, 2, 1.0}, {2, 4, 1.0}, {0, 3, 1.0}, {3, 4, 1.0},
                 {0, 1, 2.0}, {1, 4, 4.0}, {2, 1, 2.0}, {1, 2, 2.0},
                 {3, 1, 1.0}, {1, 3, 2.0}, {1, 1, 0.0}};
    inst.arcs.pop_back();  // no self loops
    inst.rebuild_adjacency();
    Solution sol = make_solution(inst, {{0, 2, 4}, {0, 3, 4}});
    Rng rng(2);
    CHECK(greedy_insert(inst, sol, rng));
    // Cheapest insertion: between 3 and 4 (1 + 4 - 1 = 4) vs between 0 and 1
    // slots... the winner is position (3,1): delta = d(3,1)+d(1,4)-d(3,4) = 4.
    // Position (0,1) in route A: d(0,1)+d(1,2)-d(0,2) = 3. That one wins.
    CHECK(sol.routes[0].vertices == std::vector<int>{0, 1, 2, 4});
    CHECK(validate_solution(inst, sol).feasible);
}

TEST_CASE("greedy_insert: empty route accepts a vertex within the limit") {
    const Instance inst = line_instance(3, 4.0);
    Solution sol = make_solution(inst, {{0, 2}});
    Rng rng(3);
    CHECK(greedy_insert(inst, sol, rng));
    CHECK(sol.routes[0].vertices == std::vector<int>{0, 1, 2});

    // With a tight limit nothing fits.
    Instance tight = line_instance(3, 2.0);
    tight.coords[1] = Point{1.0, 5.0};
    build_graph(tight);
    Solution blocked = make_solution(tight, {{0, 2}});
    CHECK_FALSE(greedy_insert(tight, blocked, rng));
    CHECK(blocked.routes[0].vertices == std::vector<int>{0, 2});
}

TEST_CASE("inter_route_exchange: needs two routes and strict gains") {
    const Instance inst = line_instance(5, 20.0);
    Solution single = make_solution(inst, {{0, 1, 2, 4}});
    CHECK_FALSE(inter_route_exchange(inst, single, ExchangeKind::OneOne));

    // Symmetric twin routes: every 1-1 swap saves exactly zero.
    Instance twin;
    twin.init(6);  // s a b c d t with a,c and b,d symmetric
    twin.s = 0;
    twin.t = 5;
    twin.fleet_size = 2;
    twin.time_limit = 20.0;
    twin.has_coords = true;
    twin.coords = {{0, 0}, {1, 1}, {2, 1}, {1, -1}, {2, -1}, {3, 0}};
    for (int v = 1; v <= 4; ++v) {
        twin.profitable[v] = 1;
        twin.profit[v] = 1;
    }
    build_graph(twin);
    Solution sym = make_solution(twin, {{0, 1, 2, 5}, {0, 3, 4, 5}});
    const double before = sym.total_time;
    CHECK_FALSE(inter_route_exchange(twin, sym, ExchangeKind::OneOne));
    CHECK(sym.total_time == before);
}

TEST_CASE("inter_route_exchange: 1-0 move applies a strict saving") {
    Instance inst;
    inst.init(5);  // s a b t plus spare
    inst.s = 0;
    inst.t = 4;
    inst.fleet_size = 2;
    inst.time_limit = 20.0;
    inst.profitable[1] = inst.profitable[2] = 1;
    inst.profit[1] = inst.profit[2] = 1;
    inst.arcs = {{0, 1, 3.0}, {1, 4, 3.0}, {0, 2, 1.0}, {2, 4, 1.0},
                 {0, 4, 1.0}, {2, 1, 1.0}, {1, 2, 5.0}, {1, 3, 1.0}, {3, 4, 1.0}};
    inst.rebuild_adjacency();
    Solution sol = make_solution(inst, {{0, 1, 4}, {0, 2, 4}});
    const double before = sol.total_time;  // 6 + 2 = 8
    const long long profit = sol.profit_sum;
    CHECK(inter_route_exchange(inst, sol, ExchangeKind::OneZero));
    CHECK(sol.total_time < before - 1e-9);
    CHECK(sol.profit_sum == profit);  // vertex set preserved
    CHECK(validate_solution(inst, sol).feasible);
}

TEST_CASE("three_opt: short routes and already-optimal lines stay put") {
    const Instance inst = line_instance(4, 10.0);
    Route route{{0, 1, 2, 3}, 0.0};
    route.duration = route_time(inst, route);
    CHECK_FALSE(three_opt(inst, route));
    CHECK(route.vertices == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("three_opt: improvement blocked by a missing reverse arc") {
    Instance inst;
    inst.init(4);  // s a b t
    inst.s = 0;
    inst.t = 3;
    inst.time_limit = 50.0;
    inst.fleet_size = 1;
    // Route s->a->b->t costs 12; s->b->a->t would cost 3 but needs b->a.
    inst.arcs = {{0, 1, 5.0}, {1, 2, 5.0}, {2, 3, 2.0}, {0, 2, 1.0}, {1, 3, 1.0}};
    inst.rebuild_adjacency();
    Route route{{0, 1, 2, 3}, 12.0};
    CHECK_FALSE(three_opt(inst, route));
    CHECK(route.vertices == std::vector<int>{0, 1, 2, 3});

    inst.arcs.push_back({2, 1, 1.0});
    inst.rebuild_adjacency();
    Route again{{0, 1, 2, 3}, 12.0};
    CHECK(three_opt(inst, again));
    CHECK(again.vertices == std::vector<int>{0, 2, 1, 3});
    CHECK(again.duration == doctest::Approx(3.0));
}

TEST_CASE("three_opt: output admits no further <=3-cut reconnection") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 6 + static_cast<int>(rng.uniform_index(3));
        Instance inst = oracle::random_euclidean_instance(n, 1, 10.0, 4000 + trial);
        std::vector<int> interior;
        for (int v = 1; v + 1 < n; ++v) interior.push_back(v);
        rng.shuffle(interior);
        Route route;
        route.vertices.push_back(inst.s);
        for (std::size_t k = 0; k < interior.size(); ++k) route.vertices.push_back(interior[k]);
        route.vertices.push_back(inst.t);
        route.duration = route_time(inst, route);
        const double before = route.duration;
        const std::vector<int> vertex_set_before = [&] {
            auto v = route.vertices;
            std::sort(v.begin(), v.end());
            return v;
        }();

        three_opt(inst, route);
        CHECK(route.duration <= before + 1e-9);
        CHECK(route.duration == doctest::Approx(route_time(inst, route)));
        auto sorted_after = route.vertices;
        std::sort(sorted_after.begin(), sorted_after.end());
        CHECK(sorted_after == vertex_set_before);
    }
}

TEST_CASE("unvisited_replace: profit gain and 2-1 consolidation") {
    const Instance inst = line_instance(6, 20.0);
    SUBCASE("no unvisited vertices") {
        Solution sol = make_solution(inst, {{0, 1, 2, 3, 4, 5}});
        Rng rng(1);
        CHECK_FALSE(unvisited_replace(inst, sol, ReplaceKind::OneOne, rng));
    }
    SUBCASE("higher profit swaps in") {
        Instance rich = inst;
        rich.profit[3] = 5;
        Solution sol = make_solution(rich, {{0, 1, 5}});
        Rng rng(1);
        CHECK(unvisited_replace(rich, sol, ReplaceKind::OneOne, rng));
        CHECK(sol.profit_sum == 5);
        CHECK(validate_solution(rich, sol).feasible);
    }
    SUBCASE("2-1 nets plus one") {
        Instance rich = line_instance(6, 7.0);
        rich.profit[4] = 3;
        // Visits 1 and 2 (profit 1 each); 4 pays 3 and frees time.
        Solution sol = make_solution(rich, {{0, 1, 2, 5}});
        Rng rng(1);
        CHECK(unvisited_replace(rich, sol, ReplaceKind::TwoOne, rng));
        CHECK(sol.profit_sum == 3);
        CHECK(validate_solution(rich, sol).feasible);
    }
}

TEST_CASE("local_search: fixed point, idempotence and monotone profit") {
    Rng rng(8);
    int fixtures = 0;
    for (std::uint64_t seed = 1; fixtures < 1000; ++seed) {
        REQUIRE(seed < 400);
        const Instance inst = oracle::random_euclidean_instance(
            7, 2, 1.8, 3000 + seed, seed % 4 == 0 ? 0.2 : 0.0);
        const std::vector<Route> routes = oracle::enumerate_routes(inst);
        if (routes.empty()) continue;
        for (int trial = 0; trial < 4 && fixtures < 1000; ++trial) {
            Solution sol;
            std::vector<char> used(inst.n, 0);
            for (int k = 0; k < inst.fleet_size; ++k) {
                const Route& r = routes[rng.uniform_index(routes.size())];
                bool clash = false;
                for (int v : r.vertices) {
                    if (inst.is_interior(v) && used[v]) clash = true;
                }
                if (clash) continue;
                for (int v : r.vertices) used[v] = 1;
                sol.routes.push_back(r);
            }
            sol.refresh(inst);
            if (!validate_solution(inst, sol).feasible) continue;
            ++fixtures;
            const long long profit_before = sol.profit_sum;
            Rng ls_rng(seed * 100 + trial);
            local_search(inst, sol, ls_rng);
            CHECK(sol.profit_sum >= profit_before);
            CHECK(validate_solution(inst, sol).feasible);

            // A second pass from the reached point changes nothing.
            Solution again = sol;
            Rng ls_rng2(seed * 100 + trial);
            local_search(inst, again, ls_rng2);
            CHECK(again.profit_sum == sol.profit_sum);
            CHECK(again.total_time == doctest::Approx(sol.total_time));
        }
    }
}

TEST_CASE("shift_perturbation: guards and relocations") {
    SUBCASE("single route cannot shift") {
        const Instance inst = line_instance(5, 20.0);
        Solution sol = make_solution(inst, {{0, 1, 2, 4}});
        Rng rng(1);
        CHECK_FALSE(shift_perturbation(inst, sol, rng));
    }
    SUBCASE("overflowing destinations keep the vertex in place") {
        Instance inst = line_instance(6, 4.4, 2);
        // Both routes nearly full: moving anything across overflows.
        Solution sol = make_solution(inst, {{0, 1, 2, 5}, {0, 3, 4, 5}});
        Rng rng(1);
        shift_perturbation(inst, sol, rng);
        CHECK(validate_solution(inst, sol).feasible);
        CHECK(sol.visited_count() == 6);
    }
    SUBCASE("a move frees room for an insertion into the source route") {
        // Route 1 carries v=2 only because 1 and 3 cannot both fit; moving 2
        // to route 2 lets the freed route take the unvisited vertex 3.
        Instance inst;
        inst.init(6);  // s v2 v3 a t ... custom arcs below
        inst.s = 0;
        inst.t = 5;
        inst.fleet_size = 2;
        inst.time_limit = 10.0;
        for (int v = 1; v <= 4; ++v) {
            inst.profitable[v] = 1;
            inst.profit[v] = 1;
        }
        inst.arcs = {{0, 1, 9.0}, {1, 5, 1.0},                   // route 1 path s->1->t
                     {0, 2, 1.0}, {2, 5, 1.0},                   // route 2 path s->2->t
                     {2, 1, 1.0},                                 // lets 1 ride behind 2
                     {0, 3, 5.0}, {3, 5, 5.0},                   // vertex 3 fits only alone
                     {1, 3, 1.0}, {3, 1, 1.0}, {2, 3, 1.0}, {3, 2, 1.0},
                     {0, 4, 20.0}, {4, 5, 20.0}};
        inst.rebuild_adjacency();
        Solution sol = make_solution(inst, {{0, 1, 5}, {0, 2, 5}});
        REQUIRE(validate_solution(inst, sol).feasible);
        Rng rng(1);
        const bool moved = shift_perturbation(inst, sol, rng);
        CHECK(moved);
        CHECK(validate_solution(inst, sol).feasible);
        // Vertex 1 now rides behind 2, and 3 joined the emptied first route.
        CHECK(sol.visited_count() == 5);
    }
}

TEST_CASE("path_between: delta handling") {
    const Instance inst = line_instance(6, 20.0);
    SUBCASE("guide adds nothing") {
        const Solution start = make_solution(inst, {{0, 1, 2, 3, 5}});
        const Solution guide = make_solution(inst, {{0, 1, 2, 5}});
        Rng rng(1);
        const Solution out = path_between(inst, start, guide, rng);
        CHECK(solution_key(out) == solution_key(start));
    }
    SUBCASE("one addable vertex with slack") {
        const Solution start = make_solution(inst, {{0, 1, 2, 5}});
        const Solution guide = make_solution(inst, {{0, 3, 4, 5}});
        Rng rng(1);
        const Solution out = path_between(inst, start, guide, rng);
        CHECK(out.profit_sum >= 2);
        CHECK(validate_solution(inst, out).feasible);
    }
    SUBCASE("tight limit inserts then strips the cheapest profit") {
        Instance inst2 = line_instance(4, 0.0, 1);
        inst2.coords = {{0, 0}, {0, 3}, {0, 4}, {0, 0}};  // t at the origin again
        build_graph(inst2);
        inst2.time_limit = 8.0;
        inst2.profit[1] = 1;
        inst2.profit[2] = 5;
        const Solution start = make_solution(inst2, {{0, 1, 3}});   // time 6
        const Solution guide = make_solution(inst2, {{0, 2, 3}});   // time 8
        Rng rng(1);
        const Solution out = path_between(inst2, start, guide, rng);
        CHECK(out.profit_sum == 5);  // 2 in, 1 out
        CHECK(validate_solution(inst2, out).feasible);
    }
}

TEST_CASE("path_relinking: similarity gate and pool updates") {
    const Instance inst = line_instance(7, 30.0, 2);
    SUBCASE("documented similarity value relinks") {
        // X visits {s,a,b,t}, Y visits {s,a,c,t}: similarity 0.75 < 0.9.
        const Solution x = make_solution(inst, {{0, 1, 2, 6}});
        const Solution y = make_solution(inst, {{0, 1, 3, 6}});
        Pool pool(5);
        pool.try_add(x);
        Rng rng(1);
        path_relinking(inst, pool, y, 0.9, rng);
        // Relinking discovers the union solution with three visits.
        CHECK(pool.best().profit_sum >= 3);
    }
    SUBCASE("identical solutions are skipped") {
        const Solution y = make_solution(inst, {{0, 1, 2, 6}});
        Pool pool(5);
        pool.try_add(y);
        Rng rng(1);
        path_relinking(inst, pool, y, 0.9, rng);
        CHECK(pool.size() == 1);
        CHECK(pool.best().profit_sum == y.profit_sum);
    }
    SUBCASE("empty pool only gains the offered point") {
        const Solution y = make_solution(inst, {{0, 1, 2, 6}});
        Pool pool(5);
        Rng rng(1);
        path_relinking(inst, pool, y, 0.9, rng);
        CHECK(pool.size() == 1);
    }
}

TEST_CASE("lns_run: zero iterations return the locally improved start") {
    const Instance inst = line_instance(6, 20.0);
    const Solution start = make_solution(inst, {{0, 1, 5}});
    LnsConfig cfg;
    cfg.max_iter = 0;
    Rng rng(5);
    const LnsResult out = lns_run(inst, start, cfg, rng);
    CHECK(out.trace.empty());
    CHECK(out.best.profit_sum == 4);  // insertion fills the line
    CHECK(validate_solution(inst, out.best).feasible);
}

TEST_CASE("lns_run: rejects infeasible starts") {
    const Instance inst = line_instance(6, 2.0);
    const Solution bad = make_solution(inst, {{0, 1, 2, 3, 4, 5}});  // over the limit
    LnsConfig cfg;
    Rng rng(1);
    CHECK_THROWS_AS(lns_run(inst, bad, cfg, rng), std::invalid_argument);
}

TEST_CASE("lns_run: deterministic trace and monotone incumbent") {
    const Instance inst = oracle::random_euclidean_instance(8, 2, 1.6, 42);
    const PreprocessResult pre = preprocess(inst, shortest_times(inst));
    REQUIRE_FALSE(pre.provably_infeasible);
    const std::vector<Route> routes = oracle::enumerate_routes(pre.instance);
    REQUIRE_FALSE(routes.empty());
    Solution start;
    start.routes.push_back(routes.front());
    start.refresh(pre.instance);
    REQUIRE(validate_solution(pre.instance, start).feasible);

    LnsConfig cfg;
    cfg.max_iter = 120;
    auto run = [&]() {
        Rng rng(2024);
        return lns_run(pre.instance, start, cfg, rng);
    };
    const LnsResult a = run();
    const LnsResult b = run();
    CHECK(a.best.profit_sum == b.best.profit_sum);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace[k].best_profit == b.trace[k].best_profit);
        if (k > 0) CHECK(a.trace[k].best_profit >= a.trace[k - 1].best_profit);
    }
    CHECK(validate_solution(pre.instance, a.best).feasible);
}

TEST_CASE("lns_run: stop-on-stall halts without path relinking") {
    const Instance inst = oracle::random_euclidean_instance(7, 2, 1.5, 77);
    const PreprocessResult pre = preprocess(inst, shortest_times(inst));
    REQUIRE_FALSE(pre.provably_infeasible);
    const std::vector<Route> routes = oracle::enumerate_routes(pre.instance);
    REQUIRE_FALSE(routes.empty());
    Solution start;
    start.routes.push_back(routes.front());
    start.refresh(pre.instance);

    LnsConfig cfg;
    cfg.max_iter = 100000;
    cfg.stalling_limit = 20;
    cfg.stop_on_stall = true;
    Rng rng(9);
    const LnsResult out = lns_run(pre.instance, start, cfg, rng);
    CHECK(out.pr_calls == 0);
    CHECK(static_cast<int>(out.trace.size()) < 100000);  // stopped early
}
