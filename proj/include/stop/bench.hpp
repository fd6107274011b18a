#ifndef STOP_BENCH_HPP
#define STOP_BENCH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stop/instance.hpp"
#include "stop/pump.hpp"

namespace stop {

struct PipelineOptions {
    std::string algo = "ofp-cuts";  // {fp,ofp}-{raw,cuts}
    int lns_iters = 5000;
    std::uint64_t seed = 0;
    bool stop_on_stall = false;
    std::string lp_backend;  // empty: STOP_FORGE_LP or simplex
};

struct RunReport {
    std::string instance_name;
    std::string algo;
    std::uint64_t seed = 0;
    bool proven_infeasible = false;
    bool feasible = false;
    long long profit = 0;
    int pumps = 0;
    int lns_iters = 0;
    PumpStatus pump_status = PumpStatus::Exhausted;
    double cut_seconds = 0.0;
    double fp_seconds = 0.0;
    double lns_seconds = 0.0;
    double plain_bound = 0.0;  // LP bound before cuts
    double final_bound = 0.0;  // LP bound after reinforcement
    std::vector<std::vector<int>> routes;  // original vertex ids
};

// Full solve on an instance whose arcs are already populated:
// preprocessing, optional cutting-plane reinforcement, FP/OFP, LNS.
RunReport run_pipeline(const Instance& inst, const PipelineOptions& opts);

int pipeline_exit_code(const RunReport& report);

std::string report_to_json(const RunReport& report);

// Gap conventions: 0 for proven-infeasible instances and for
// best == achieved == 0; 100 when no feasible solution was produced;
// otherwise 100 * (LB* - LB) / LB*. No bound, no gap.
std::optional<double> compute_gap(std::optional<double> best_lb, double avg_lb,
                                  bool proven_infeasible, bool any_feasible);

struct DetailRow {
    std::string set;
    std::string instance;
    std::string algo;
    std::uint64_t seed = 0;
    long long profit = 0;
    bool feasible = false;
    bool proven_infeasible = false;
    int pumps = 0;
    double cut_seconds = 0.0;
    double fp_seconds = 0.0;
    double lns_seconds = 0.0;
    std::optional<double> gap;
};

struct AggregateRow {
    std::string set;
    std::string algo;
    int instances = 0;
    std::optional<double> avg_gap;
    std::optional<double> stdev_gap;
    double avg_profit = 0.0;
    double avg_best_profit = 0.0;
    double avg_seconds = 0.0;
};

DetailRow detail_from_report(const RunReport& report,
                             const std::map<std::string, double>& bounds);

// Per-set aggregation; instance gaps use the average bound over seeds.
std::vector<AggregateRow> aggregate_rows(const std::vector<DetailRow>& details,
                                         const std::map<std::string, double>& bounds);

std::string csv_header();
std::string csv_line(const DetailRow& row);
std::string csv_line(const AggregateRow& row);

// Set label: instance name up to the first '.'.
std::string set_of_instance(const std::string& name);

struct BenchOptions {
    std::string dir;
    std::string algo = "ofp-cuts";
    std::vector<std::uint64_t> seeds;
    std::string bounds_path;  // optional
    std::string out_path;
    int lns_iters = 5000;
    bool stop_on_stall = false;
    int jobs = 1;
};

int run_bench(const BenchOptions& opts);

struct ConvertOptions {
    std::string in_path;
    std::string out_path;
    double pct = 0.05;
    std::uint64_t seed = 0;
};

int run_convert(const ConvertOptions& opts);

}  // namespace stop

#endif
