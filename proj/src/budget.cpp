#include "qrc/budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrc {

namespace {

void validate_core(const RegimeParams& p) {
    if (!(p.sigma_max > 0.0)) throw std::invalid_argument("budget: sigma_max must be > 0");
    if (!(p.eps > 0.0)) throw std::invalid_argument("budget: eps must be > 0");
    if (!(p.p > 0.0 && p.p < 1.0)) throw std::invalid_argument("budget: p must be in (0,1)");
    if (!(p.delta > 0.0 && p.delta < 1.0))
        throw std::invalid_argument("budget: delta must be in (0,1)");
    if (p.n_groups == 0) throw std::invalid_argument("budget: n_groups must be >= 1");
    if (p.n_obligors == 0) throw std::invalid_argument("budget: n_obligors must be >= 1");
    if (p.eps > p.sigma_max * std::sqrt(static_cast<double>(p.n_groups)) * (1.0 + 1e-12))
        throw std::invalid_argument("budget: eps exceeds sigma_max*sqrt(n_groups); outside "
                                    "the working regime");
}

double confidence_log(const RegimeParams& p) {
    const double arg = static_cast<double>(p.n_groups) / p.delta;
    if (!(arg > 1.0))
        throw std::invalid_argument("budget: n_groups/delta must exceed 1 for a positive "
                                    "log factor");
    return std::log(arg);
}

}  // namespace

BudgetPair quantum_budget(const RegimeParams& params) {
    validate_core(params);
    if (!(params.c_max > 0.0)) throw std::invalid_argument("budget: c_max must be > 0");
    if (!(params.e_max > 0.0)) throw std::invalid_argument("budget: e_max must be > 0");
    const double range_arg = std::max(params.c_max / params.eps, params.e_max / params.sigma_max);
    if (!(range_arg > 1.0))
        throw std::invalid_argument("budget: max(c_max/eps, e_max/sigma_max) must exceed 1 "
                                    "for a positive log factor");
    const double calls = params.sigma_max * std::sqrt(static_cast<double>(params.n_groups)) /
                         (params.eps * std::sqrt(params.p)) * std::log(range_arg) *
                         confidence_log(params);
    return {calls, calls * static_cast<double>(params.n_obligors)};
}

BudgetPair classical_budget(const RegimeParams& params) {
    validate_core(params);
    const double draws =
        params.sigma_max * params.sigma_max * confidence_log(params) / (params.eps * params.eps * params.p);
    return {draws, draws * static_cast<double>(params.n_obligors)};
}

AdvantageVerdict advantage_condition(const RegimeParams& params, double threshold) {
    validate_core(params);
    if (!(threshold > 0.0)) throw std::invalid_argument("budget: threshold must be > 0");
    AdvantageVerdict v;
    v.lhs = params.sigma_max * params.sigma_max / (params.eps * params.eps * params.p);
    v.rhs = static_cast<double>(params.n_groups);
    v.threshold = threshold;
    v.quantum_favored = v.lhs >= threshold * v.rhs;
    return v;
}

AdvantageVerdict advantage_condition_regime(const RegimeParams& params, double threshold) {
    if (!(params.pbar_def > 0.0 && params.pbar_def < 1.0))
        throw std::invalid_argument("budget: pbar_def must be in (0,1)");
    if (!(params.ebar > 0.0)) throw std::invalid_argument("budget: ebar must be > 0");
    if (!(params.eps > 0.0)) throw std::invalid_argument("budget: eps must be > 0");
    if (!(params.p > 0.0 && params.p < 1.0))
        throw std::invalid_argument("budget: p must be in (0,1)");
    if (params.n_obligors == 0) throw std::invalid_argument("budget: n_obligors must be >= 1");
    if (!(threshold > 0.0)) throw std::invalid_argument("budget: threshold must be > 0");

    const double c_max = params.pbar_def * params.ebar;
    const double ratio = c_max / params.eps;
    AdvantageVerdict v;
    v.lhs = ratio * ratio * (1.0 - params.pbar_def) / (params.p * params.pbar_def);
    v.rhs = static_cast<double>(params.n_obligors);
    v.threshold = threshold;
    v.quantum_favored = v.lhs >= threshold * v.rhs;
    v.note = "reaching ~1e8 requires c_max/eps ~ 100, i.e. the accuracy ratio quoted as "
             "'c_max/eps ~ 0.01' must be read as eps/c_max ~ 0.01";
    return v;
}

std::vector<BudgetSweepRow> budget_sweep(const RegimeParams& base,
                                         const std::vector<double>& eps_values,
                                         const std::vector<std::size_t>& group_counts) {
    if (eps_values.empty() || group_counts.empty())
        throw std::invalid_argument("budget_sweep: empty sweep axis");
    std::vector<BudgetSweepRow> rows;
    rows.reserve(eps_values.size() * group_counts.size());
    for (std::size_t n_gr : group_counts) {
        for (double eps : eps_values) {
            RegimeParams p = base;
            p.eps = eps;
            p.n_groups = n_gr;
            const BudgetPair q = quantum_budget(p);
            const BudgetPair c = classical_budget(p);
            rows.push_back({eps, n_gr, q.scenario_calls, q.arithmetic_calls, c.scenario_calls,
                            c.arithmetic_calls});
        }
    }
    return rows;
}

}  // namespace qrc
