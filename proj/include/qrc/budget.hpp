#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qrc {

// Inputs for the closed-form query-budget calculators. All quantities are
// leading-order regime parameters, not measured ledgers:
//   sigma_max   largest tail-conditional group standard deviation
//   eps         target absolute accuracy on each contribution
//   p           tail probability P(L >= v)
//   delta       overall failure-probability budget
//   c_max       bound on the largest contribution magnitude
//   e_max       largest group exposure
//   pbar_def    typical conditional default probability (regime analysis)
//   ebar        typical single-obligor exposure (regime analysis)
struct RegimeParams {
    double sigma_max = 0.0;
    double eps = 0.0;
    double p = 0.0;
    double delta = 0.0;
    double c_max = 0.0;
    double e_max = 0.0;
    std::size_t n_groups = 0;
    std::size_t n_obligors = 0;
    double pbar_def = 0.0;
    double ebar = 0.0;
};

// A budget splits into calls to the scenario source (factor-state loader on
// the quantum side, normal draws on the classical side) and the arithmetic
// work those calls drag along, which is the same count times N_obl.
struct BudgetPair {
    double scenario_calls = 0.0;
    double arithmetic_calls = 0.0;
};

// Leading-order quantum query budget, constants set to 1 and log factors
// spelled out:
//   scenario_calls = sigma_max*sqrt(n_groups) / (eps*sqrt(p))
//                    * ln(max(c_max/eps, e_max/sigma_max)) * ln(n_groups/delta)
// Requires both log arguments > 1 so the figure is positive.
BudgetPair quantum_budget(const RegimeParams& params);

// Classical Monte Carlo counterpart:
//   scenario_calls = sigma_max^2 * ln(n_groups/delta) / (eps^2 * p)
BudgetPair classical_budget(const RegimeParams& params);

struct AdvantageVerdict {
    double lhs = 0.0;
    double rhs = 0.0;
    double threshold = 0.0;  // how many times rhs the lhs must reach
    bool quantum_favored = false;
    std::string note;  // documented caveats (ratio-notation discrepancy)
};

// Direct comparison of the two budgets' leading factors: quantum is favored
// when sigma_max^2/(eps^2 p) exceeds n_groups by at least `threshold` times.
AdvantageVerdict advantage_condition(const RegimeParams& params, double threshold = 10.0);

// Same comparison with the regime substitutions sigma_max^2 = pbar(1-pbar)*ebar^2
// and c_max = pbar*ebar applied, which turns the left side into
// (c_max/eps)^2 * (1-pbar)/(p*pbar) and the right side into n_obligors.
AdvantageVerdict advantage_condition_regime(const RegimeParams& params,
                                            double threshold = 10.0);

struct BudgetSweepRow {
    double eps = 0.0;
    std::size_t n_groups = 0;
    double quantum_scenario_calls = 0.0;
    double quantum_arithmetic_calls = 0.0;
    double classical_scenario_calls = 0.0;
    double classical_arithmetic_calls = 0.0;
};

// Budget table over a grid of accuracies and group counts, holding the other
// regime parameters fixed.
std::vector<BudgetSweepRow> budget_sweep(const RegimeParams& base,
                                         const std::vector<double>& eps_values,
                                         const std::vector<std::size_t>& group_counts);

}  // namespace qrc
