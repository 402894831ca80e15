#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vlcalloc/allocation.hpp"

namespace vlcalloc {

enum class VarKind { Binary, Continuous };

struct MilpVariable {
    std::string name;
    VarKind kind = VarKind::Continuous;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct LinearTerm {
    std::size_t var = 0;
    double coef = 0.0;
};

struct MilpConstraint {
    std::string name;
    std::vector<LinearTerm> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

/// Linearised product phi = USINR(us, ap, w, b) * S(ui, cp, w, f).
struct ProductVar {
    std::size_t var;
    std::size_t usinr;
    std::size_t selector;
};

/// Mixed-integer linear model of the sum-SINR assignment problem. Continuous
/// variables are non-negative and unbounded above; binaries are 0/1.
struct MilpModel {
    std::size_t users = 0, aps = 0, wavelengths = 0, branches = 0;
    double alpha = 0.0;
    /// The SINR balance rows are divided by this factor (the receiver noise)
    /// so their coefficients are of order one.
    double balance_scale = 1.0;
    std::vector<MilpVariable> variables;
    std::vector<MilpConstraint> constraints;
    std::vector<LinearTerm> objective;  // maximised
    std::vector<ProductVar> products;

    [[nodiscard]] std::size_t tuple(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return ((us * aps + ap) * wavelengths + w) * branches + b;
    }
    /// Variable index of S(us, ap, w, b); selectors occupy the first block.
    [[nodiscard]] std::size_t selector(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return tuple(us, ap, w, b);
    }
    /// Variable index of USINR(us, ap, w, b); the second block.
    [[nodiscard]] std::size_t usinr(std::size_t us, std::size_t ap, std::size_t w, std::size_t b) const {
        return users * aps * wavelengths * branches + tuple(us, ap, w, b);
    }
    [[nodiscard]] std::size_t binary_count() const;
};

/// 1e6 times the largest P / sigma_Rx, which exceeds every attainable SINR.
double default_big_m(const AllocationProblem& problem);

/// Builds the linearised model. Throws if `alpha` does not exceed the largest
/// attainable SINR.
MilpModel build_milp(const AllocationProblem& problem, double alpha);

/// CPLEX LP text. Variable names are S_us_ap_l_b, USINR_us_ap_l_b and
/// phi_us_ui_ap_cp_l_b_f, all 1-based.
std::string export_lp(const MilpModel& model);

struct Substitution {
    std::vector<double> values;  // one per model variable
    /// Largest constraint violation relative to the row's magnitude.
    double max_violation = 0.0;
};

/// Fixes S to `assignment`, derives the linearisation variables from the
/// big-M rows and each USINR from its balance row, then measures how well
/// every constraint holds. Throws if a balance row does not determine its
/// USINR.
Substitution substitute_assignment(const MilpModel& model, const Assignment& assignment);

/// Value of the model objective for a variable vector.
double evaluate_objective(const MilpModel& model, const std::vector<double>& values);

}  // namespace vlcalloc
