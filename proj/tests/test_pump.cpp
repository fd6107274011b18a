#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stop/cuts.hpp"
#include "stop/pump.hpp"

using namespace stop;

TEST_CASE("distance_objective: endpoints of the convex combination") {
    const auto fig = oracle::figure_one();
    const StopModel model = build_model(fig.inst, shortest_times(fig.inst));
    const int num_arcs = fig.inst.num_arcs();
    std::vector<char> x_tilde(num_arcs, 0);
    x_tilde[0] = 1;

    SUBCASE("gamma 0 is the pure normalized distance") {
        double offset = 0.0;
        const auto coeffs = distance_objective(model, fig.inst, x_tilde, 0.0, &offset);
        const double scale = 1.0 / std::sqrt(num_arcs);
        for (int a = 0; a < num_arcs; ++a) {
            CHECK(coeffs[model.x_var[a]] ==
                  doctest::Approx(x_tilde[a] ? -scale : scale));
        }
        for (int v = 0; v < fig.inst.n; ++v) CHECK(coeffs[model.y_var[v]] == 0.0);
        CHECK(offset == doctest::Approx(scale));

        // Objective evaluates to zero at x = x_tilde.
        double value = offset;
        for (int a = 0; a < num_arcs; ++a) {
            value += coeffs[model.x_var[a]] * (x_tilde[a] ? 1.0 : 0.0);
        }
        CHECK(value == doctest::Approx(0.0));
    }

    SUBCASE("gamma 1 is the pure normalized negated profit") {
        const auto coeffs = distance_objective(model, fig.inst, x_tilde, 1.0);
        double norm = 0.0;
        for (int v = 0; v < fig.inst.n; ++v) {
            norm += static_cast<double>(fig.inst.profit[v]) * fig.inst.profit[v];
        }
        norm = std::sqrt(norm);
        for (int a = 0; a < num_arcs; ++a) CHECK(coeffs[model.x_var[a]] == 0.0);
        for (int v = 0; v < fig.inst.n; ++v) {
            if (fig.inst.profitable[v]) {
                CHECK(coeffs[model.y_var[v]] == doctest::Approx(-fig.inst.profit[v] / norm));
            }
        }
    }

    SUBCASE("zero profits drop the objective term") {
        Instance flat = fig.inst;
        for (int v = 0; v < flat.n; ++v) flat.profit[v] = 0;
        const auto coeffs = distance_objective(model, flat, x_tilde, 1.0);
        for (double c : coeffs) CHECK(c == 0.0);
    }
}

TEST_CASE("round distance never exceeds half the arc count") {
    Rng rng(64);
    for (int trial = 0; trial < 200; ++trial) {
        const int num_arcs = 1 + static_cast<int>(rng.uniform_index(40));
        std::vector<double> x(num_arcs);
        for (double& v : x) v = rng.uniform_real();
        const std::vector<char> rounded = round_point(x);
        double delta = 0.0;
        for (int a = 0; a < num_arcs; ++a) delta += std::abs(x[a] - rounded[a]);
        CHECK(delta <= num_arcs / 2.0 + 1e-12);
    }
}

TEST_CASE("extract_solution: walks, splits and rejects") {
    const auto fig = oracle::figure_one();
    std::vector<char> x(fig.inst.num_arcs(), 0);

    SUBCASE("single route") {
        x[fig.inst.arc_id(fig.s, fig.l)] = 1;
        x[fig.inst.arc_id(fig.l, fig.j)] = 1;
        x[fig.inst.arc_id(fig.j, fig.t)] = 1;
        const Solution sol = extract_solution(fig.inst, x);
        REQUIRE(sol.routes.size() == 1);
        CHECK(sol.routes[0].vertices == std::vector<int>{fig.s, fig.l, fig.j, fig.t});
        CHECK(sol.routes[0].duration == doctest::Approx(4.0));
    }

    SUBCASE("no arcs means no routes") {
        const Solution sol = extract_solution(fig.inst, x);
        CHECK(sol.routes.empty());
        CHECK(sol.profit_sum == 0);
    }

    SUBCASE("two disjoint paths become two routes") {
        Instance inst;
        inst.init(4);  // s a b t
        inst.s = 0;
        inst.t = 3;
        inst.fleet_size = 2;
        inst.time_limit = 10.0;
        inst.arcs = {{0, 1, 1.0}, {1, 3, 1.0}, {0, 2, 1.0}, {2, 3, 1.0}};
        inst.rebuild_adjacency();
        std::vector<char> sel(4, 1);
        const Solution sol = extract_solution(inst, sel);
        CHECK(sol.routes.size() == 2);
    }

    SUBCASE("dangling structure is a structural error") {
        x[fig.inst.arc_id(fig.s, fig.i)] = 1;  // i has no selected outgoing arc
        CHECK_THROWS(extract_solution(fig.inst, x));
    }
}

TEST_CASE("pump: integral first solve returns immediately") {
    // Complete 3-vertex graph with one profitable stop; the relaxation
    // optimum is the integral route through it.
    Instance inst;
    inst.init(3);
    inst.s = 0;
    inst.t = 2;
    inst.fleet_size = 1;
    inst.time_limit = 10.0;
    inst.has_coords = true;
    inst.coords = {{0, 0}, {1, 0}, {2, 0}};
    inst.profitable[1] = 1;
    inst.profit[1] = 5;
    build_graph(inst);
    const PreprocessResult pre = preprocess(inst, shortest_times(inst));
    const StopModel model = build_model(pre.instance, pre.r);
    auto backend = make_lp_backend("simplex");
    backend->load(model.lp);
    Rng rng(1);
    const PumpOutcome out = pump(pre.instance, model, *backend, PumpConfig{}, rng);
    REQUIRE(out.status == PumpStatus::Found);
    CHECK(out.pumps_used == 1);
    REQUIRE(out.solution.has_value());
    CHECK(out.solution->profit_sum == 5);
    CHECK(validate_solution(pre.instance, *out.solution).feasible);
}

TEST_CASE("pump: exhausts when the pump budget is too small") {
    // The worked digraph's relaxation value exceeds any integral profit, so
    // the first LP cannot come out integer.
    const auto fig = oracle::figure_one();
    const StopModel model = build_model(fig.inst, shortest_times(fig.inst));
    auto backend = make_lp_backend("simplex");
    backend->load(model.lp);
    PumpConfig cfg;
    cfg.max_pumps = 1;
    Rng rng(3);
    const PumpOutcome out = pump(fig.inst, model, *backend, cfg, rng);
    CHECK(out.status == PumpStatus::Exhausted);
    CHECK(out.pumps_used == 1);
    CHECK_FALSE(out.solution.has_value());
}

TEST_CASE("pump: infeasible relaxation is surfaced") {
    Instance inst;
    inst.init(4);
    inst.s = 0;
    inst.t = 3;
    inst.fleet_size = 1;
    inst.time_limit = 14.0;
    inst.mandatory[1] = inst.mandatory[2] = 1;
    inst.has_coords = true;
    inst.coords = {{0, 0}, {0, 3}, {10, 3}, {10, 0}};
    build_graph(inst);
    const PreprocessResult pre = preprocess(inst, shortest_times(inst));
    REQUIRE_FALSE(pre.provably_infeasible);
    const StopModel model = build_model(pre.instance, pre.r);
    auto backend = make_lp_backend("simplex");
    backend->load(model.lp);
    Rng rng(5);
    CHECK(pump(pre.instance, model, *backend, PumpConfig{}, rng).status ==
          PumpStatus::Infeasible);
}

TEST_CASE("pump: perturbations flip between 6 and 14 entries with the default basis") {
    int perturbations = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        Instance raw = oracle::random_euclidean_instance(8, 2, 1.4, 700 + seed);
        const PreprocessResult pre = preprocess(raw, shortest_times(raw));
        if (pre.provably_infeasible) continue;
        const StopModel model = build_model(pre.instance, pre.r);
        auto backend = make_lp_backend("simplex");
        backend->load(model.lp);
        PumpConfig cfg;
        cfg.max_pumps = 60;
        cfg.decay = 0.0;
        Rng rng(seed);
        const PumpOutcome out = pump(pre.instance, model, *backend, cfg, rng);
        for (const PumpTraceRecord& rec : out.trace) {
            if (rec.flips > 0) {
                ++perturbations;
                CHECK(rec.flips >= 6);
                CHECK(rec.flips <= 14);
            }
        }
        if (out.status == PumpStatus::Found) {
            CHECK(validate_solution(pre.instance, *out.solution).feasible);
        }
    }
    // The plain pump cycles often enough to exercise the perturbation.
    CHECK(perturbations > 0);
}

TEST_CASE("pump: plain variant loses the profit term after pump one") {
    const auto fig = oracle::figure_one();
    const StopModel model = build_model(fig.inst, shortest_times(fig.inst));
    auto backend = make_lp_backend("simplex");
    backend->load(model.lp);
    PumpConfig cfg;
    cfg.max_pumps = 8;
    cfg.decay = 0.0;
    Rng rng(9);
    const PumpOutcome out = pump(fig.inst, model, *backend, cfg, rng);
    REQUIRE(out.trace.size() >= 2);
    CHECK(out.trace[0].gamma == doctest::Approx(1.0));
    for (std::size_t k = 1; k < out.trace.size(); ++k) {
        CHECK(out.trace[k].gamma == 0.0);
    }
    // With gamma = 0 the auxiliary objective carries no y coefficients.
    const auto coeffs =
        distance_objective(model, fig.inst, std::vector<char>(fig.inst.num_arcs(), 0), 0.0);
    for (int v = 0; v < fig.inst.n; ++v) CHECK(coeffs[model.y_var[v]] == 0.0);
}

TEST_CASE("pump: deterministic replay") {
    Instance raw = oracle::random_euclidean_instance(8, 2, 1.5, 1234);
    const PreprocessResult pre = preprocess(raw, shortest_times(raw));
    REQUIRE_FALSE(pre.provably_infeasible);
    const StopModel model = build_model(pre.instance, pre.r);
    PumpConfig cfg;
    cfg.max_pumps = 40;
    cfg.decay = 0.9;

    auto run = [&]() {
        auto backend = make_lp_backend("simplex");
        backend->load(model.lp);
        Rng rng(77);
        return pump(pre.instance, model, *backend, cfg, rng);
    };
    const PumpOutcome a = run();
    const PumpOutcome b = run();
    CHECK(a.status == b.status);
    CHECK(a.pumps_used == b.pumps_used);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace[k].gamma == b.trace[k].gamma);
        CHECK(a.trace[k].distance == b.trace[k].distance);
        CHECK(a.trace[k].flips == b.trace[k].flips);
    }
}

TEST_CASE("pump: runs against the cut-reinforced model") {
    Instance raw = oracle::random_euclidean_instance(8, 2, 1.5, 555);
    const PreprocessResult pre = preprocess(raw, shortest_times(raw));
    REQUIRE_FALSE(pre.provably_infeasible);
    const StopModel model = build_model(pre.instance, pre.r);
    auto backend = make_lp_backend("simplex");
    const CuttingPlaneResult cuts =
        cutting_plane(pre.instance, pre.r, model, *backend, CutFamilies{true, true, true});
    REQUIRE_FALSE(cuts.infeasible);
    PumpConfig cfg;
    cfg.decay = 0.9;
    Rng rng(4);
    const PumpOutcome out = pump(pre.instance, model, *backend, cfg, rng);
    if (out.status == PumpStatus::Found) {
        CHECK(validate_solution(pre.instance, *out.solution).feasible);
    } else {
        CHECK(out.status == PumpStatus::Exhausted);
    }
}
