#ifndef STOP_LP_HPP
#define STOP_LP_HPP

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace stop {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

enum class Sense { LE, EQ, GE };

struct LinearConstraint {
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

// A bounded LP: lower <= v <= upper, rows with senses, linear objective.
struct LinearModel {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> objective;
    bool maximize = true;
    std::vector<LinearConstraint> constraints;
    int base_constraints = 0;  // rows present before any cut was appended

    int num_vars() const { return static_cast<int>(lower.size()); }

    int add_var(double lo, double hi, double obj) {
        lower.push_back(lo);
        upper.push_back(hi);
        objective.push_back(obj);
        return num_vars() - 1;
    }

    void add_constraint(LinearConstraint c) { constraints.push_back(std::move(c)); }

    double activity(const LinearConstraint& c, const std::vector<double>& values) const {
        double acc = 0.0;
        for (const auto& [var, coeff] : c.terms) acc += coeff * values[var];
        return acc;
    }
};

enum class LpStatus { Optimal, Infeasible };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
};

// Injected LP solve contract: build, append constraints, swap objectives,
// resolve. Implementations keep their internal state warm across calls.
class LpBackend {
public:
    virtual ~LpBackend() = default;

    virtual void load(const LinearModel& model) = 0;
    virtual void append_constraint(const LinearConstraint& c) = 0;
    virtual void set_objective(const std::vector<double>& coeffs, bool maximize) = 0;
    virtual LpSolution solve() = 0;

    // The model as currently loaded, cuts included.
    virtual const LinearModel& model() const = 0;
    virtual std::string name() const = 0;
};

// Known backends: "simplex". The STOP_FORGE_LP environment variable picks
// the default.
std::unique_ptr<LpBackend> make_lp_backend(const std::string& name);
std::string default_lp_backend_name();

}  // namespace stop

#endif
