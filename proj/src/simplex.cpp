#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "stop/lp.hpp"

namespace stop {

namespace {

constexpr double kBoundTol = 1e-7;    // primal feasibility on bounds
constexpr double kCostTol = 1e-7;     // reduced-cost optimality
constexpr double kPivotTol = 1e-9;    // entries treated as zero in ratio tests
constexpr double kDegenStep = 1e-10;  // step sizes counted as degenerate
constexpr int kRefactorInterval = 1000;
constexpr int kBlandTrigger = 300;
constexpr long long kIterationLimit = 2000000;

// Bounded-variable primal simplex with a dense product-form basis inverse.
// Phase 1 minimizes the total bound infeasibility of the basic variables
// (slack basis start), phase 2 optimizes the loaded objective. The basis is
// kept warm across objective swaps and appended rows.
class SimplexBackend final : public LpBackend {
public:
    void load(const LinearModel& model) override {
        model_ = model;
        ns_ = model.num_vars();
        m_ = 0;
        cols_.assign(ns_, {});
        lo_.assign(model.lower.begin(), model.lower.end());
        up_.assign(model.upper.begin(), model.upper.end());
        rhs_.clear();
        basic_.clear();
        where_.assign(ns_, -1);
        at_upper_.assign(ns_, 0);
        for (int j = 0; j < ns_; ++j) at_upper_[j] = initial_at_upper(j);
        for (const LinearConstraint& c : model.constraints) append_row(c);
        set_objective(model.objective, model.maximize);
        rebuild_inverse();
        recompute_beta();
    }

    void append_constraint(const LinearConstraint& c) override {
        model_.add_constraint(c);
        append_row(c);
        // Extended basis: the new slack is basic, so
        //   B' = [[B, 0], [r_B, 1]],  B'^-1 = [[B^-1, 0], [-r_B B^-1, 1]].
        const int old_m = m_ - 1;
        std::vector<double> new_binv(static_cast<std::size_t>(m_) * m_, 0.0);
        std::vector<double> row_b(old_m, 0.0);  // r_B B^-1
        for (const auto& [var, coeff] : c.terms) {
            const int pos = where_[var];
            if (pos >= 0) {
                for (int k = 0; k < old_m; ++k) {
                    row_b[k] += coeff * binv_[static_cast<std::size_t>(k) * old_m + pos];
                }
            }
        }
        for (int k = 0; k < old_m; ++k) {
            double* dst = &new_binv[static_cast<std::size_t>(k) * m_];
            const double* src = &binv_[static_cast<std::size_t>(k) * old_m];
            std::copy(src, src + old_m, dst);
            dst[old_m] = -row_b[k];
        }
        new_binv[static_cast<std::size_t>(old_m) * m_ + old_m] = 1.0;
        binv_ = std::move(new_binv);
        beta_.push_back(0.0);
        recompute_beta();
    }

    void set_objective(const std::vector<double>& coeffs, bool maximize) override {
        if (static_cast<int>(coeffs.size()) != ns_) {
            throw std::invalid_argument("set_objective: wrong coefficient count");
        }
        model_.objective = coeffs;
        model_.maximize = maximize;
        cost_.assign(ns_ + m_, 0.0);
        const double sign = maximize ? -1.0 : 1.0;
        for (int j = 0; j < ns_; ++j) cost_[j] = sign * coeffs[j];
    }

    LpSolution solve() override {
        if (cost_.size() != static_cast<std::size_t>(ns_ + m_)) {
            cost_.resize(ns_ + m_, 0.0);
        }
        LpSolution out;
        if (!phase1()) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        phase2();
        out.status = LpStatus::Optimal;
        out.values.resize(ns_);
        double obj = 0.0;
        for (int j = 0; j < ns_; ++j) {
            out.values[j] = value(j);
            obj += cost_[j] * out.values[j];
        }
        out.objective = model_.maximize ? -obj : obj;
        return out;
    }

    const LinearModel& model() const override { return model_; }
    std::string name() const override { return "simplex"; }

private:
    int num_vars_total() const { return ns_ + m_; }

    bool initial_at_upper(int j) const {
        return !std::isfinite(lo_[j]) && std::isfinite(up_[j]);
    }

    double bound_value(int j) const {
        if (at_upper_[j]) return up_[j];
        if (std::isfinite(lo_[j])) return lo_[j];
        return 0.0;
    }

    double value(int j) const {
        const int pos = where_[j];
        return pos >= 0 ? beta_[pos] : bound_value(j);
    }

    // Adds one row plus its slack; the slack enters the basis.
    void append_row(const LinearConstraint& c) {
        for (const auto& [var, coeff] : c.terms) {
            if (var < 0 || var >= ns_) throw std::invalid_argument("constraint names unknown var");
            cols_[var].push_back({m_, coeff});
        }
        rhs_.push_back(c.rhs);
        double slack_lo = 0.0, slack_up = 0.0;
        switch (c.sense) {
            case Sense::LE:
                slack_lo = 0.0;
                slack_up = kLpInf;
                break;
            case Sense::EQ:
                slack_lo = slack_up = 0.0;
                break;
            case Sense::GE:
                slack_lo = -kLpInf;
                slack_up = 0.0;
                break;
        }
        lo_.push_back(slack_lo);
        up_.push_back(slack_up);
        if (!cost_.empty()) cost_.push_back(0.0);
        const int slack = ns_ + m_;
        basic_.push_back(slack);
        where_.push_back(m_);
        at_upper_.push_back(0);
        ++m_;
    }

    // Sparse column of a variable; slacks are unit columns.
    void ftran_column(int j, std::vector<double>& w) const {
        std::fill(w.begin(), w.end(), 0.0);
        if (j < ns_) {
            for (const auto& [row, coeff] : cols_[j]) {
                const double* col = &binv_[static_cast<std::size_t>(row) * m_];
                for (int i = 0; i < m_; ++i) w[i] += coeff * col[i];
            }
        } else {
            const double* col = &binv_[static_cast<std::size_t>(j - ns_) * m_];
            for (int i = 0; i < m_; ++i) w[i] = col[i];
        }
    }

    // y = B^-T d for a dense d over basis positions.
    void btran(const std::vector<double>& d, std::vector<double>& y) const {
        y.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            const double* col = &binv_[static_cast<std::size_t>(k) * m_];
            double acc = 0.0;
            for (int i = 0; i < m_; ++i) acc += d[i] * col[i];
            y[k] = acc;
        }
    }

    double dot_column(int j, const std::vector<double>& y) const {
        if (j < ns_) {
            double acc = 0.0;
            for (const auto& [row, coeff] : cols_[j]) acc += coeff * y[row];
            return acc;
        }
        return y[j - ns_];
    }

    void recompute_beta() {
        std::vector<double> residual = rhs_;
        for (int j = 0; j < num_vars_total(); ++j) {
            if (where_[j] >= 0) continue;
            const double v = bound_value(j);
            if (v == 0.0) continue;
            if (j < ns_) {
                for (const auto& [row, coeff] : cols_[j]) residual[row] -= coeff * v;
            } else {
                residual[j - ns_] -= v;
            }
        }
        beta_.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            const double r = residual[k];
            if (r == 0.0) continue;
            const double* col = &binv_[static_cast<std::size_t>(k) * m_];
            for (int i = 0; i < m_; ++i) beta_[i] += r * col[i];
        }
    }

    // Gauss-Jordan inversion of the basis matrix, column-major result.
    void rebuild_inverse() {
        std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int pos = 0; pos < m_; ++pos) {
            const int j = basic_[pos];
            if (j < ns_) {
                for (const auto& [row, coeff] : cols_[j]) {
                    b[static_cast<std::size_t>(pos) * m_ + row] = coeff;
                }
            } else {
                b[static_cast<std::size_t>(pos) * m_ + (j - ns_)] = 1.0;
            }
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;

        std::vector<int> col_of_row(m_, -1);  // elimination order bookkeeping
        std::vector<char> used(m_, 0);
        for (int step = 0; step < m_; ++step) {
            // Pivot: largest entry in column `step` over unused rows.
            int pr = -1;
            double best = 0.0;
            for (int r = 0; r < m_; ++r) {
                if (used[r]) continue;
                const double v = std::abs(b[static_cast<std::size_t>(step) * m_ + r]);
                if (v > best) {
                    best = v;
                    pr = r;
                }
            }
            if (pr < 0 || best < 1e-12) throw std::runtime_error("simplex: singular basis");
            used[pr] = 1;
            col_of_row[step] = pr;
            const double inv_pivot = 1.0 / b[static_cast<std::size_t>(step) * m_ + pr];
            for (int k = 0; k < m_; ++k) {
                b[static_cast<std::size_t>(k) * m_ + pr] *= inv_pivot;
                binv_[static_cast<std::size_t>(k) * m_ + pr] *= inv_pivot;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == pr) continue;
                const double factor = b[static_cast<std::size_t>(step) * m_ + r];
                if (factor == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    b[static_cast<std::size_t>(k) * m_ + r] -=
                        factor * b[static_cast<std::size_t>(k) * m_ + pr];
                    binv_[static_cast<std::size_t>(k) * m_ + r] -=
                        factor * binv_[static_cast<std::size_t>(k) * m_ + pr];
                }
            }
        }
        // Rows of the inverse are permuted by the pivot order; restore.
        std::vector<double> fixed(static_cast<std::size_t>(m_) * m_);
        for (int k = 0; k < m_; ++k) {
            for (int step = 0; step < m_; ++step) {
                fixed[static_cast<std::size_t>(k) * m_ + step] =
                    binv_[static_cast<std::size_t>(k) * m_ + col_of_row[step]];
            }
        }
        binv_ = std::move(fixed);
        updates_ = 0;
    }

    // Product-form update after `entering` replaces basis position r.
    void update_inverse(const std::vector<double>& w, int r) {
        const double inv_pivot = 1.0 / w[r];
        for (int k = 0; k < m_; ++k) {
            double* col = &binv_[static_cast<std::size_t>(k) * m_];
            const double pivot_val = col[r] * inv_pivot;
            if (pivot_val != 0.0) {
                for (int i = 0; i < m_; ++i) col[i] -= w[i] * pivot_val;
                col[r] = pivot_val;
            } else {
                col[r] = 0.0;
            }
        }
        if (++updates_ >= kRefactorInterval) {
            rebuild_inverse();
            recompute_beta();
        }
    }

    struct Ratio {
        double step = kLpInf;
        int pos = -1;        // basis position; -1 means the entering bound flip
        bool to_upper = false;  // bound the leaving variable ends on
    };

    // Shared ratio test. In phase 1, basics that currently violate a bound
    // block only when they reach the violated bound from outside.
    Ratio ratio_test(const std::vector<double>& w, int entering, int dir, bool phase1,
                     const std::vector<int>& infeas_dir, bool bland) const {
        Ratio best;
        if (std::isfinite(up_[entering]) && std::isfinite(lo_[entering])) {
            best.step = up_[entering] - lo_[entering];
            best.pos = -1;
        }
        double best_pivot = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double delta = -dir * w[i];  // basic value rate of change
            if (std::abs(delta) < kPivotTol) continue;
            const int var = basic_[i];
            const int d = phase1 ? infeas_dir[i] : 0;
            double step = kLpInf;
            bool to_upper = false;
            if (d == 0) {
                if (delta > 0.0) {
                    if (!std::isfinite(up_[var])) continue;
                    step = (up_[var] - beta_[i]) / delta;
                    to_upper = true;
                } else {
                    if (!std::isfinite(lo_[var])) continue;
                    step = (beta_[i] - lo_[var]) / (-delta);
                }
            } else if (d < 0) {
                // Below its lower bound: blocks when rising back to it.
                if (delta <= 0.0) continue;
                step = (lo_[var] - beta_[i]) / delta;
            } else {
                if (delta >= 0.0) continue;
                step = (up_[var] - beta_[i]) / delta;
                to_upper = true;
            }
            if (step < 0.0) step = 0.0;
            const double pivot = std::abs(w[i]);
            bool better;
            if (step < best.step - 1e-9) {
                better = true;
            } else if (step <= best.step + 1e-9) {
                if (bland) {
                    better = best.pos < 0 || var < basic_[best.pos];
                } else {
                    better = pivot > best_pivot;
                }
            } else {
                better = false;
            }
            if (better) {
                best.step = std::min(step, best.step);
                best.pos = i;
                best.to_upper = to_upper;
                best_pivot = pivot;
            }
        }
        return best;
    }

    void apply_step(int entering, int dir, const std::vector<double>& w, const Ratio& r) {
        const double t = r.step;
        if (r.pos < 0) {
            // Bound flip, basis unchanged.
            for (int i = 0; i < m_; ++i) beta_[i] -= dir * t * w[i];
            at_upper_[entering] = !at_upper_[entering];
            return;
        }
        const int leaving = basic_[r.pos];
        const double enter_value = bound_value(entering) + dir * t;
        for (int i = 0; i < m_; ++i) beta_[i] -= dir * t * w[i];
        beta_[r.pos] = enter_value;
        basic_[r.pos] = entering;
        where_[entering] = r.pos;
        where_[leaving] = -1;
        at_upper_[leaving] = r.to_upper;
        update_inverse(w, r.pos);
    }

    // Minimizes total bound infeasibility; returns false when a strictly
    // positive optimum proves the model infeasible.
    bool phase1() {
        std::vector<int> infeas_dir(m_, 0);
        std::vector<double> d(m_), y, w(m_);
        int degenerate_streak = 0;
        for (long long iter = 0; iter < kIterationLimit; ++iter) {
            double total = 0.0;
            for (int i = 0; i < m_; ++i) {
                const int var = basic_[i];
                infeas_dir[i] = 0;
                d[i] = 0.0;
                if (beta_[i] < lo_[var] - kBoundTol) {
                    infeas_dir[i] = -1;
                    d[i] = -1.0;
                    total += lo_[var] - beta_[i];
                } else if (beta_[i] > up_[var] + kBoundTol) {
                    infeas_dir[i] = 1;
                    d[i] = 1.0;
                    total += beta_[i] - up_[var];
                }
            }
            if (total <= kBoundTol) return true;

            btran(d, y);
            const bool bland = degenerate_streak > kBlandTrigger;
            int entering = -1, dir = 0;
            double best_score = kCostTol;
            for (int j = 0; j < num_vars_total(); ++j) {
                if (where_[j] >= 0) continue;
                if (lo_[j] == up_[j]) continue;
                const double zeta = dot_column(j, y);
                int cand_dir = 0;
                if (!at_upper_[j] && zeta > kCostTol) {
                    cand_dir = 1;
                } else if (at_upper_[j] && zeta < -kCostTol) {
                    cand_dir = -1;
                } else {
                    continue;
                }
                if (bland) {
                    entering = j;
                    dir = cand_dir;
                    break;
                }
                if (std::abs(zeta) > best_score) {
                    best_score = std::abs(zeta);
                    entering = j;
                    dir = cand_dir;
                }
            }
            if (entering < 0) return false;  // infeasibility is locally optimal and positive

            ftran_column(entering, w);
            const Ratio r = ratio_test(w, entering, dir, true, infeas_dir, bland);
            if (!std::isfinite(r.step)) {
                throw std::runtime_error("simplex: unbounded phase-1 ray");
            }
            degenerate_streak = r.step <= kDegenStep ? degenerate_streak + 1 : 0;
            apply_step(entering, dir, w, r);
        }
        throw std::runtime_error("simplex: phase-1 iteration limit");
    }

    void phase2() {
        std::vector<double> cb(m_), y, w(m_);
        std::vector<int> no_infeas(m_, 0);
        int degenerate_streak = 0;
        for (long long iter = 0; iter < kIterationLimit; ++iter) {
            for (int i = 0; i < m_; ++i) cb[i] = cost_[basic_[i]];
            btran(cb, y);
            const bool bland = degenerate_streak > kBlandTrigger;
            int entering = -1, dir = 0;
            double best_score = kCostTol;
            for (int j = 0; j < num_vars_total(); ++j) {
                if (where_[j] >= 0) continue;
                if (lo_[j] == up_[j]) continue;
                const double z = cost_[j] - dot_column(j, y);
                int cand_dir = 0;
                if (!at_upper_[j] && z < -kCostTol) {
                    cand_dir = 1;
                } else if (at_upper_[j] && z > kCostTol) {
                    cand_dir = -1;
                } else {
                    continue;
                }
                if (bland) {
                    entering = j;
                    dir = cand_dir;
                    break;
                }
                if (std::abs(z) > best_score) {
                    best_score = std::abs(z);
                    entering = j;
                    dir = cand_dir;
                }
            }
            if (entering < 0) return;  // optimal

            ftran_column(entering, w);
            const Ratio r = ratio_test(w, entering, dir, false, no_infeas, bland);
            if (!std::isfinite(r.step)) {
                throw std::runtime_error("simplex: unbounded objective");
            }
            degenerate_streak = r.step <= kDegenStep ? degenerate_streak + 1 : 0;
            apply_step(entering, dir, w, r);
        }
        throw std::runtime_error("simplex: phase-2 iteration limit");
    }

    LinearModel model_;
    int ns_ = 0;  // structural variables
    int m_ = 0;   // rows
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lo_, up_, cost_, rhs_;
    std::vector<int> basic_;    // basis position -> variable
    std::vector<int> where_;    // variable -> basis position or -1
    std::vector<char> at_upper_;
    std::vector<double> binv_;  // m x m, column-major
    std::vector<double> beta_;  // basic variable values
    int updates_ = 0;
};

}  // namespace

std::unique_ptr<LpBackend> make_lp_backend(const std::string& name) {
    if (name == "simplex" || name.empty()) return std::make_unique<SimplexBackend>();
    throw std::invalid_argument("unknown LP backend '" + name + "' (available: simplex)");
}

std::string default_lp_backend_name() {
    const char* env = std::getenv("STOP_FORGE_LP");
    return env && *env ? env : "simplex";
}

}  // namespace stop
