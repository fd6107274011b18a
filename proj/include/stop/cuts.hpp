#ifndef STOP_CUTS_HPP
#define STOP_CUTS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "stop/graph_kernels.hpp"
#include "stop/instance.hpp"
#include "stop/lp.hpp"
#include "stop/model.hpp"

namespace stop {

enum class CutKind { CCC, AVIC, LCI };

// A valid inequality in <= form over model variable indices.
struct Cut {
    CutKind kind = CutKind::CCC;
    std::vector<std::pair<int, double>> terms;  // sorted by variable index
    double rhs = 0.0;
    double violation = 0.0;  // against the separating point
    double norm = 0.0;       // Euclidean norm of the coefficients
};

struct CutSelectionPolicy {
    double ccc_violation = 0.01;
    double lci_violation = 1e-5;
    double ccc_max_inner = 0.03;
};

// Conflict pairs, their graph over interior vertices, and the maximal
// conflict cliques (singletons included).
struct ConflictStructure {
    std::vector<std::pair<int, int>> pairs;         // i < j
    std::vector<std::vector<int>> cliques;          // sorted, lexicographic order
    std::vector<std::vector<int>> cliques_of;       // vertex -> clique indices
    bool truncated = false;
};

// Pair {i,j} conflicts when no minimum-time route can cover both orders
// within the limit; unreachable legs count as over the limit.
std::vector<std::pair<int, int>> conflict_pairs(const Instance& inst, const RMatrix& r,
                                                ExecPolicy policy = ExecPolicy::Serial);

ConflictStructure build_conflicts(const Instance& inst, const RMatrix& r,
                                  std::size_t clique_cap = 100000,
                                  ExecPolicy policy = ExecPolicy::Serial);

struct CccOptions {
    double residual_threshold = 1e-9;
    bool filter_active = true;  // clique deactivation after each emission
    ExecPolicy policy = ExecPolicy::Serial;
};

// Max-flow separation over the maximal conflict cliques: a cut-set
// inequality per violated clique, both orientations tested.
std::vector<Cut> separate_cccs(const FractionalPoint& point, const ConflictStructure& conflicts,
                               const Instance& inst, const StopModel& model,
                               const CutSelectionPolicy& policy, const CccOptions& opts = {});

// One pair of inference cuts per bidirectional arc pair, by enumeration.
std::vector<Cut> separate_avics(const Instance& inst, const StopModel& model);

// At most one lifted cover inequality on the profit knapsack bounded by tau.
std::optional<Cut> separate_lci(const FractionalPoint& point, const Instance& inst,
                                const StopModel& model, double tau,
                                const CutSelectionPolicy& policy);

// Keeps the most violated cut (by distance = violation / norm) and every
// candidate sufficiently orthogonal to all kept ones.
std::vector<Cut> select_cuts(std::vector<Cut> candidates, double max_inner_product);

double cut_violation(const Cut& cut, const std::vector<double>& values);

struct CutFamilies {
    bool ccc = true;
    bool avic = true;
    bool lci = true;
};

struct CuttingPlaneIter {
    int iteration = 0;
    double bound = 0.0;
    int ccc_added = 0;
    int avic_added = 0;
    int lci_added = 0;
};

struct CuttingPlaneResult {
    bool infeasible = false;
    double plain_bound = 0.0;
    double final_bound = 0.0;
    std::vector<CuttingPlaneIter> trace;
    std::vector<Cut> cuts;  // everything appended, in order
};

// Reinforcement loop: AVICs up front, then rounds of CCC/LCI separation
// until no cuts remain or the bound improvement drops to epsilon1.
CuttingPlaneResult cutting_plane(const Instance& inst, const RMatrix& r, const StopModel& model,
                                 LpBackend& backend, const CutFamilies& enable,
                                 const CutSelectionPolicy& policy = {},
                                 double epsilon1 = 1e-3, ExecPolicy policy_exec = ExecPolicy::Serial);

}  // namespace stop

#endif
