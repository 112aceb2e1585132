#pragma once

// Solver-independent mixed-integer linear model: variables, linear
// expressions, constraints, a minimization objective, and free-form
// constraint annotations (used to find balance and line-limit rows later).

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sparsched/common.hpp"

namespace sparsched {

enum class VarKind { Continuous, Binary };

enum class Sense { LE, EQ, GE };

inline const char* sense_text(Sense s) {
    switch (s) {
        case Sense::LE: return "<=";
        case Sense::EQ: return "=";
        case Sense::GE: return ">=";
    }
    return "?";
}

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0;
    double ub = kInf;
};

// Sparse linear expression: coefficient map over variable indices plus a
// constant. The map keeps term order deterministic.
class LinExpr {
public:
    LinExpr() = default;

    LinExpr& add(int var, double coef) {
        if (var < 0) throw StructuralError("negative variable index");
        if (!std::isfinite(coef)) throw StructuralError("non-finite coefficient");
        if (coef == 0.0) return *this;
        auto [it, fresh] = terms_.emplace(var, coef);
        if (!fresh) {
            it->second += coef;
            if (it->second == 0.0) terms_.erase(it);
        }
        return *this;
    }

    LinExpr& add(const LinExpr& other, double scale = 1.0) {
        for (const auto& [v, c] : other.terms_) add(v, c * scale);
        constant_ += other.constant_ * scale;
        return *this;
    }

    LinExpr& add_constant(double c) {
        if (!std::isfinite(c)) throw StructuralError("non-finite constant");
        constant_ += c;
        return *this;
    }

    const std::map<int, double>& terms() const { return terms_; }
    double constant() const { return constant_; }
    bool empty() const { return terms_.empty(); }

private:
    std::map<int, double> terms_;
    double constant_ = 0.0;
};

struct Constraint {
    std::string name;
    std::map<int, double> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

class MilpModel {
public:
    explicit MilpModel(std::string name = "model") : name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    int add_continuous(const std::string& name, double lb, double ub) {
        if (std::isnan(lb) || std::isnan(ub) || lb > ub) {
            throw StructuralError("bad bounds for variable " + name + ": [" +
                                  fmt_full(lb) + ", " + fmt_full(ub) + "]");
        }
        return add_var({name, VarKind::Continuous, lb, ub});
    }

    int add_binary(const std::string& name) {
        return add_var({name, VarKind::Binary, 0.0, 1.0});
    }

    // expr sense rhs, with expr's constant folded onto the right-hand side.
    int add_constraint(const std::string& name, const LinExpr& expr, Sense sense,
                       double rhs) {
        if (!std::isfinite(rhs)) {
            throw StructuralError("non-finite rhs for constraint " + name);
        }
        if (expr.empty()) {
            throw StructuralError("constraint " + name + " has no variable terms");
        }
        if (!con_index_.emplace(name, static_cast<int>(cons_.size())).second) {
            throw StructuralError("duplicate constraint name: " + name);
        }
        Constraint c;
        c.name = name;
        c.terms = expr.terms();
        for (const auto& [v, coef] : c.terms) {
            if (v >= static_cast<int>(vars_.size())) {
                throw StructuralError("constraint " + name +
                                      " references unknown variable index");
            }
            (void)coef;
        }
        c.sense = sense;
        c.rhs = rhs - expr.constant();
        cons_.push_back(std::move(c));
        return static_cast<int>(cons_.size()) - 1;
    }

    void add_objective(const LinExpr& expr) {
        for (const auto& [v, c] : expr.terms()) {
            if (v >= static_cast<int>(vars_.size())) {
                throw StructuralError("objective references unknown variable index");
            }
            auto [it, fresh] = obj_.emplace(v, c);
            if (!fresh) {
                it->second += c;
                if (it->second == 0.0) obj_.erase(it);
            }
        }
        obj_constant_ += expr.constant();
    }

    void set_objective_constant(double c) { obj_constant_ = c; }

    void annotate(const std::string& constraint_name, const std::string& role) {
        if (!con_index_.count(constraint_name)) {
            throw StructuralError("annotating unknown constraint: " +
                                  constraint_name);
        }
        annotations_[constraint_name] = role;
    }

    const Variable& var(int i) const { return vars_.at(static_cast<std::size_t>(i)); }
    const Constraint& con(int i) const {
        return cons_.at(static_cast<std::size_t>(i));
    }
    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(cons_.size()); }

    int num_binaries() const {
        int n = 0;
        for (const auto& v : vars_) n += v.kind == VarKind::Binary;
        return n;
    }

    bool has_var(const std::string& name) const { return var_index_.count(name); }

    int var_index(const std::string& name) const {
        auto it = var_index_.find(name);
        if (it == var_index_.end()) {
            throw StructuralError("unknown variable: " + name);
        }
        return it->second;
    }

    int con_index(const std::string& name) const {
        auto it = con_index_.find(name);
        if (it == con_index_.end()) {
            throw StructuralError("unknown constraint: " + name);
        }
        return it->second;
    }

    bool has_con(const std::string& name) const { return con_index_.count(name); }

    const std::map<int, double>& objective() const { return obj_; }
    double objective_constant() const { return obj_constant_; }
    const std::map<std::string, std::string>& annotations() const {
        return annotations_;
    }

    // Turn a binary into a continuous variable fixed at an integer value; the
    // LMP pass does this for every binary before re-solving as an LP.
    void fix_binary(const std::string& name, double value) {
        Variable& v = vars_[static_cast<std::size_t>(var_index(name))];
        if (v.kind != VarKind::Binary) {
            throw StructuralError("fix_binary on non-binary variable " + name);
        }
        const double r = std::round(value);
        if (std::abs(value - r) > 1e-4 || r < 0.0 || r > 1.0) {
            throw ConsistencyError("binary " + name +
                                   " has non-integral value " + fmt_full(value));
        }
        v.kind = VarKind::Continuous;
        v.lb = v.ub = r;
    }

private:
    int add_var(Variable v) {
        if (v.name.empty()) throw StructuralError("empty variable name");
        if (!var_index_.emplace(v.name, static_cast<int>(vars_.size())).second) {
            throw StructuralError("duplicate variable name: " + v.name);
        }
        vars_.push_back(std::move(v));
        return static_cast<int>(vars_.size()) - 1;
    }

    std::string name_;
    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    std::map<int, double> obj_;
    double obj_constant_ = 0.0;
    std::unordered_map<std::string, int> var_index_;
    std::unordered_map<std::string, int> con_index_;
    std::map<std::string, std::string> annotations_;
};

}  // namespace sparsched
