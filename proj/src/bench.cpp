#include "stop/bench.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "stop/cuts.hpp"
#include "stop/lns.hpp"
#include "stop/parse.hpp"
#include "stop/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stop {

namespace {

struct AlgoSpec {
    bool objective_pump = false;
    bool with_cuts = false;
};

AlgoSpec parse_algo(const std::string& name) {
    AlgoSpec spec;
    if (name == "fp-raw") {
        spec = {false, false};
    } else if (name == "fp-cuts") {
        spec = {false, true};
    } else if (name == "ofp-raw") {
        spec = {true, false};
    } else if (name == "ofp-cuts") {
        spec = {true, true};
    } else {
        throw std::invalid_argument("unknown algorithm '" + name +
                                    "' (fp-raw|fp-cuts|ofp-raw|ofp-cuts)");
    }
    return spec;
}

double seconds_since(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

// Idle vehicles become direct origin-destination routes so the local
// searches can spread vertices over the whole fleet.
void pad_routes(const Instance& inst, Solution& sol) {
    if (!inst.has_arc(inst.s, inst.t)) return;
    const double direct = inst.arc_time(inst.s, inst.t);
    if (direct > inst.time_limit + kTimeEps) return;
    while (static_cast<int>(sol.routes.size()) < inst.fleet_size) {
        Route route;
        route.vertices = {inst.s, inst.t};
        route.duration = direct;
        sol.total_time += direct;
        sol.routes.push_back(std::move(route));
    }
}

}  // namespace

RunReport run_pipeline(const Instance& inst, const PipelineOptions& opts) {
    RunReport report;
    report.instance_name = inst.name;
    report.algo = opts.algo;
    report.seed = opts.seed;
    report.lns_iters = opts.lns_iters;
    const AlgoSpec algo = parse_algo(opts.algo);

    const RMatrix r_full = shortest_times(inst);
    PreprocessResult pre = preprocess(inst, r_full);
    if (pre.provably_infeasible) {
        report.proven_infeasible = true;
        return report;
    }
    const Instance& work = pre.instance;

    const StopModel model = build_model(work, pre.r);
    auto backend = make_lp_backend(opts.lp_backend.empty() ? default_lp_backend_name()
                                                           : opts.lp_backend);

    const auto cut_start = std::chrono::steady_clock::now();
    if (algo.with_cuts) {
        const CuttingPlaneResult cut_result =
            cutting_plane(work, pre.r, model, *backend, CutFamilies{true, true, true});
        report.cut_seconds = seconds_since(cut_start);
        if (cut_result.infeasible) {
            report.proven_infeasible = true;
            return report;
        }
        report.plain_bound = cut_result.plain_bound;
        report.final_bound = cut_result.final_bound;
    } else {
        backend->load(model.lp);
        report.cut_seconds = seconds_since(cut_start);
    }

    Rng rng(opts.seed);
    PumpConfig pump_cfg;
    pump_cfg.max_pumps = 2000;
    pump_cfg.decay = algo.objective_pump ? 0.9 : 0.0;
    pump_cfg.flip_basis = 10;

    const auto fp_start = std::chrono::steady_clock::now();
    PumpOutcome outcome = pump(work, model, *backend, pump_cfg, rng);
    report.fp_seconds = seconds_since(fp_start);
    report.pumps = outcome.pumps_used;
    report.pump_status = outcome.status;
    if (!algo.with_cuts && !outcome.trace.empty()) {
        // The first pump minimizes the negated profit scaled by 1/||p||;
        // undo the scaling to report the plain relaxation bound.
        double norm = 0.0;
        for (int v = 0; v < work.n; ++v) {
            if (work.profitable[v]) {
                norm += static_cast<double>(work.profit[v]) * work.profit[v];
            }
        }
        report.plain_bound = report.final_bound =
            -outcome.trace.front().lp_objective * std::sqrt(norm);
    }
    if (outcome.status == PumpStatus::Infeasible) {
        report.proven_infeasible = true;
        return report;
    }
    if (outcome.status == PumpStatus::Exhausted) {
        return report;
    }

    Solution incumbent = std::move(*outcome.solution);
    pad_routes(work, incumbent);

    LnsConfig lns_cfg;
    lns_cfg.max_iter = opts.lns_iters;
    lns_cfg.stop_on_stall = opts.stop_on_stall;
    const auto lns_start = std::chrono::steady_clock::now();
    LnsResult lns = lns_run(work, incumbent, lns_cfg, rng);
    report.lns_seconds = seconds_since(lns_start);

    const ValidationReport check = validate_solution(work, lns.best);
    if (!check.feasible) throw std::logic_error("pipeline: final solution fails validation");

    report.feasible = true;
    report.profit = lns.best.profit_sum;
    for (const Route& route : lns.best.routes) {
        if (route.vertices.size() <= 2) continue;  // idle vehicle
        std::vector<int> orig;
        orig.reserve(route.vertices.size());
        for (int v : route.vertices) orig.push_back(work.orig_id[v]);
        report.routes.push_back(std::move(orig));
    }
    return report;
}

int pipeline_exit_code(const RunReport& report) {
    if (report.proven_infeasible) return 2;
    if (!report.feasible) return 3;
    return 0;
}

std::string report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["instance"] = report.instance_name;
    j["algo"] = report.algo;
    j["seed"] = report.seed;
    j["proven_infeasible"] = report.proven_infeasible;
    j["feasible"] = report.feasible;
    j["profit"] = report.profit;
    j["pumps"] = report.pumps;
    j["lns_iters"] = report.lns_iters;
    j["phase_seconds"] = {{"cuts", report.cut_seconds},
                          {"fp", report.fp_seconds},
                          {"lns", report.lns_seconds}};
    j["bounds"] = {{"plain", report.plain_bound}, {"reinforced", report.final_bound}};
    j["routes"] = report.routes;
    return j.dump(2);
}

std::optional<double> compute_gap(std::optional<double> best_lb, double avg_lb,
                                  bool proven_infeasible, bool any_feasible) {
    if (proven_infeasible) return 0.0;
    if (!best_lb) return std::nullopt;
    if (!any_feasible) return 100.0;
    if (*best_lb <= 0.0) return 0.0;
    return 100.0 * (*best_lb - avg_lb) / *best_lb;
}

std::string set_of_instance(const std::string& name) {
    const std::size_t dot = name.find('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

DetailRow detail_from_report(const RunReport& report,
                             const std::map<std::string, double>& bounds) {
    DetailRow row;
    row.set = set_of_instance(report.instance_name);
    row.instance = report.instance_name;
    row.algo = report.algo;
    row.seed = report.seed;
    row.profit = report.profit;
    row.feasible = report.feasible;
    row.proven_infeasible = report.proven_infeasible;
    row.pumps = report.pumps;
    row.cut_seconds = report.cut_seconds;
    row.fp_seconds = report.fp_seconds;
    row.lns_seconds = report.lns_seconds;
    const auto it = bounds.find(report.instance_name);
    const std::optional<double> best =
        it == bounds.end() ? std::nullopt : std::optional<double>(it->second);
    row.gap = compute_gap(best, static_cast<double>(report.profit), report.proven_infeasible,
                          report.feasible);
    return row;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<DetailRow>& details,
                                         const std::map<std::string, double>& bounds) {
    // Group detail rows per instance first: gaps aggregate over the
    // per-instance average bound across seeds.
    struct InstanceStats {
        std::string set, instance, algo;
        double lb_sum = 0.0;
        long long best_profit = 0;
        int runs = 0;
        bool any_feasible = false;
        bool proven_infeasible = false;
        double seconds = 0.0;
        double profit_sum = 0.0;
    };
    std::map<std::pair<std::string, std::string>, InstanceStats> per_instance;
    for (const DetailRow& row : details) {
        InstanceStats& st = per_instance[{row.instance, row.algo}];
        st.set = row.set;
        st.instance = row.instance;
        st.algo = row.algo;
        st.lb_sum += row.feasible ? static_cast<double>(row.profit) : 0.0;
        st.best_profit = std::max(st.best_profit, row.profit);
        st.runs += 1;
        st.any_feasible = st.any_feasible || row.feasible;
        st.proven_infeasible = st.proven_infeasible || row.proven_infeasible;
        st.seconds += row.cut_seconds + row.fp_seconds + row.lns_seconds;
        st.profit_sum += static_cast<double>(row.profit);
    }

    struct SetAccum {
        std::vector<double> gaps;
        int with_gap = 0;
        double profit_sum = 0.0;
        int run_count = 0;
        double best_profit_sum = 0.0;
        int instance_count = 0;
        double seconds = 0.0;
    };
    std::map<std::pair<std::string, std::string>, SetAccum> per_set;
    for (const auto& [key, st] : per_instance) {
        SetAccum& acc = per_set[{st.set, st.algo}];
        acc.instance_count += 1;
        acc.run_count += st.runs;
        acc.profit_sum += st.profit_sum;
        acc.best_profit_sum += static_cast<double>(st.best_profit);
        acc.seconds += st.seconds;
        const auto it = bounds.find(st.instance);
        const std::optional<double> best =
            it == bounds.end() ? std::nullopt : std::optional<double>(it->second);
        const std::optional<double> gap = compute_gap(
            best, st.lb_sum / std::max(1, st.runs), st.proven_infeasible, st.any_feasible);
        if (gap) {
            acc.gaps.push_back(*gap);
            ++acc.with_gap;
        }
    }

    std::vector<AggregateRow> rows;
    for (const auto& [key, acc] : per_set) {
        AggregateRow row;
        row.set = key.first;
        row.algo = key.second;
        row.instances = acc.instance_count;
        row.avg_profit = acc.run_count > 0 ? acc.profit_sum / acc.run_count : 0.0;
        row.avg_best_profit =
            acc.instance_count > 0 ? acc.best_profit_sum / acc.instance_count : 0.0;
        row.avg_seconds = acc.run_count > 0 ? acc.seconds / acc.run_count : 0.0;
        if (!acc.gaps.empty()) {
            double mean = 0.0;
            for (double g : acc.gaps) mean += g;
            mean /= acc.gaps.size();
            double var = 0.0;
            for (double g : acc.gaps) var += (g - mean) * (g - mean);
            var /= acc.gaps.size();
            row.avg_gap = mean;
            row.stdev_gap = std::sqrt(var);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    std::ostringstream oss;
    oss.precision(6);
    oss << std::fixed << v;
    return oss.str();
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

std::string csv_header() {
    return "row_type,set,instance,algo,seed,profit,feasible,pumps,cut_time,fp_time,lns_time,gap,"
           "avg_gap,stdev_gap,avg_profit,best_profit,avg_time";
}

std::string csv_line(const DetailRow& row) {
    std::ostringstream oss;
    oss << "detail," << row.set << ',' << row.instance << ',' << row.algo << ',' << row.seed << ','
        << row.profit << ',' << (row.feasible ? 1 : 0) << ',' << row.pumps << ','
        << fmt(row.cut_seconds) << ',' << fmt(row.fp_seconds) << ',' << fmt(row.lns_seconds) << ','
        << opt_fmt(row.gap) << ",,,,,";
    return oss.str();
}

std::string csv_line(const AggregateRow& row) {
    std::ostringstream oss;
    oss << "aggregate," << row.set << ",," << row.algo << ",,,,,,,,," << opt_fmt(row.avg_gap)
        << ',' << opt_fmt(row.stdev_gap) << ',' << fmt(row.avg_profit) << ','
        << fmt(row.avg_best_profit) << ',' << fmt(row.avg_seconds);
    return oss.str();
}

int run_bench(const BenchOptions& opts) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(opts.dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .txt instances under " + opts.dir);

    std::map<std::string, double> bounds;
    if (!opts.bounds_path.empty()) bounds = read_bounds_csv(opts.bounds_path);

    struct Job {
        std::string file;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const std::string& file : files) {
        for (std::uint64_t seed : opts.seeds) jobs.push_back({file, seed});
    }

    std::vector<DetailRow> details(jobs.size());
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, opts.jobs));
#pragma omp parallel for schedule(dynamic) if (opts.jobs > 1)
#endif
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        Instance inst = parse_instance_file(jobs[k].file, FileFormat::Stop);
        build_graph(inst);
        PipelineOptions run_opts;
        run_opts.algo = opts.algo;
        run_opts.lns_iters = opts.lns_iters;
        run_opts.seed = jobs[k].seed;
        run_opts.stop_on_stall = opts.stop_on_stall;
        details[k] = detail_from_report(run_pipeline(inst, run_opts), bounds);
    }

    std::sort(details.begin(), details.end(), [](const DetailRow& a, const DetailRow& b) {
        if (a.instance != b.instance) return a.instance < b.instance;
        return a.seed < b.seed;
    });
    const std::vector<AggregateRow> aggregates = aggregate_rows(details, bounds);

    std::ofstream out(opts.out_path);
    if (!out) throw std::runtime_error("cannot write " + opts.out_path);
    out << csv_header() << '\n';
    for (const DetailRow& row : details) out << csv_line(row) << '\n';
    for (const AggregateRow& row : aggregates) out << csv_line(row) << '\n';
    return 0;
}

int run_convert(const ConvertOptions& opts) {
    if (opts.pct < 0.0 || opts.pct > 1.0) {
        throw std::invalid_argument("percentage must lie in [0,1]");
    }
    std::ifstream in(opts.in_path);
    if (!in) throw std::runtime_error("cannot open " + opts.in_path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);

    {
        // Validate the input before rewriting it.
        std::ifstream again(opts.in_path);
        parse_instance(again, FileFormat::Top);
    }

    // Point lines are everything after the three header lines, skipping
    // comments and blanks.
    std::vector<std::size_t> point_lines;
    int header_seen = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& l = lines[i];
        bool blank = true;
        for (char c : l) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (blank || l[0] == '#') continue;
        if (header_seen < 3) {
            ++header_seen;
            continue;
        }
        point_lines.push_back(i);
    }
    if (point_lines.size() < 2) throw std::runtime_error("fewer than 2 points");

    std::vector<std::size_t> interior(point_lines.begin() + 1, point_lines.end() - 1);
    const std::size_t count =
        static_cast<std::size_t>(std::ceil(opts.pct * static_cast<double>(interior.size()) - 1e-9));
    Rng rng(opts.seed);
    rng.shuffle(interior);
    std::vector<std::size_t> chosen(interior.begin(),
                                    interior.begin() + std::min(count, interior.size()));
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t idx : chosen) lines[idx] += " M";

    std::ofstream out(opts.out_path);
    if (!out) throw std::runtime_error("cannot write " + opts.out_path);
    for (const std::string& l : lines) out << l << '\n';
    return 0;
}

}  // namespace stop
