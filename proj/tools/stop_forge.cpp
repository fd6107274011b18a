#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stop/bench.hpp"
#include "stop/parse.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
    }
    return seeds;
}

int cmd_solve(const std::string& instance_path, const stop::PipelineOptions& opts,
              const std::string& out_path) {
    stop::Instance inst = stop::parse_instance_file(instance_path, stop::FileFormat::Stop);
    stop::build_graph(inst);
    const stop::RunReport report = stop::run_pipeline(inst, opts);

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 1;
        }
        out << stop::report_to_json(report) << "\n";
    }
    if (report.proven_infeasible) {
        std::cout << "instance is provably infeasible\n";
    } else if (!report.feasible) {
        std::cout << "no feasible solution found (pump exhausted after " << report.pumps
                  << " pumps)\n";
    } else {
        std::cout << "profit " << report.profit << " with " << report.routes.size()
                  << " route(s), " << report.pumps << " pumps\n";
        for (std::size_t i = 0; i < report.routes.size(); ++i) {
            std::cout << "route " << i << ":";
            for (int v : report.routes[i]) std::cout << ' ' << v;
            std::cout << "\n";
        }
    }
    return stop::pipeline_exit_code(report);
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path) {
    stop::Instance inst = stop::parse_instance_file(instance_path, stop::FileFormat::Stop);
    stop::build_graph(inst);

    std::ifstream in(solution_path);
    if (!in) {
        std::cerr << "cannot open " << solution_path << "\n";
        return 1;
    }
    nlohmann::json j;
    in >> j;
    stop::Solution sol;
    for (const auto& route_json : j.at("routes")) {
        stop::Route route;
        for (const auto& v : route_json) route.vertices.push_back(v.get<int>());
        sol.routes.push_back(std::move(route));
    }

    const stop::ValidationReport report = stop::validate_solution(inst, sol);
    if (report.feasible) {
        std::cout << "feasible\n";
        return 0;
    }
    for (const stop::Violation& v : report.violations) {
        std::cout << "violation: " << v.detail << "\n";
    }
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steiner team orienteering solver"};
    app.require_subcommand(1);

    // solve
    std::string instance_path, out_path;
    stop::PipelineOptions solve_opts;
    CLI::App* solve = app.add_subcommand("solve", "solve one instance");
    solve->add_option("--instance", instance_path, "instance file")->required();
    solve->add_option("--algo", solve_opts.algo, "fp-raw|fp-cuts|ofp-raw|ofp-cuts");
    solve->add_option("--lns-iters", solve_opts.lns_iters, "LNS iterations");
    solve->add_option("--seed", solve_opts.seed, "random seed");
    solve->add_flag("--stop-on-stall", solve_opts.stop_on_stall,
                    "halt at the stalling limit, path relinking disabled");
    solve->add_option("--out", out_path, "JSON report path");

    // bench
    stop::BenchOptions bench_opts;
    std::string seed_csv = "1";
    CLI::App* bench = app.add_subcommand("bench", "seeded campaign over a directory");
    bench->add_option("--dir", bench_opts.dir, "instance directory")->required();
    bench->add_option("--seeds", seed_csv, "comma-separated seeds");
    bench->add_option("--algo", bench_opts.algo, "fp-raw|fp-cuts|ofp-raw|ofp-cuts");
    bench->add_option("--bounds", bench_opts.bounds_path, "best-known bounds CSV");
    bench->add_option("--out", bench_opts.out_path, "output CSV")->required();
    bench->add_option("--lns-iters", bench_opts.lns_iters, "LNS iterations");
    bench->add_flag("--stop-on-stall", bench_opts.stop_on_stall, "stalling-limit variant");
    bench->add_option("--jobs", bench_opts.jobs, "parallel workers");

    // convert
    stop::ConvertOptions convert_opts;
    CLI::App* convert = app.add_subcommand("convert", "mark random vertices as mandatory");
    convert->add_option("--in", convert_opts.in_path, "TOP instance")->required();
    convert->add_option("--pct", convert_opts.pct, "fraction of interior vertices");
    convert->add_option("--seed", convert_opts.seed, "random seed");
    convert->add_option("--out", convert_opts.out_path, "output file")->required();

    // validate
    std::string validate_instance, validate_solution_path;
    CLI::App* validate = app.add_subcommand("validate", "check a solution file");
    validate->add_option("--instance", validate_instance, "instance file")->required();
    validate->add_option("--solution", validate_solution_path, "solution JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(instance_path, solve_opts, out_path);
        if (bench->parsed()) {
            bench_opts.seeds = parse_seed_list(seed_csv);
            if (bench_opts.seeds.empty()) {
                std::cerr << "no seeds given\n";
                return 1;
            }
            return stop::run_bench(bench_opts);
        }
        if (convert->parsed()) return stop::run_convert(convert_opts);
        if (validate->parsed()) return cmd_validate(validate_instance, validate_solution_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
