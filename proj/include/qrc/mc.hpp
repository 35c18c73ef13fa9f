#pragma once

#include <cstdint>
#include <vector>

#include "qrc/model.hpp"
#include "qrc/rng.hpp"

namespace qrc {

// How the systemic factor X0 is drawn.
//  - ExactPolar: continuous standard normal via the polar method (the
//    pure-classical baseline; independent of any CDF approximation).
//  - ApproxInverseCdf: continuous draw via bisection of the shared rational
//    CDF, so X0 carries exactly the same distributional error as every other
//    CDF consumer.
//  - Grid: X0 drawn from a DiscreteSN cell law. This is the oracle-matched
//    mode: estimates converge to the same discretized ground truth the
//    enumeration and the register-level simulation use.
enum class X0Mode { ExactPolar, ApproxInverseCdf, Grid };

struct McConfig {
    std::uint64_t seed = 0;
    std::size_t samples = 0;  // semantics depend on the estimator, see below
    X0Mode x0_mode = X0Mode::ExactPolar;
    // For tail-conditional estimators: hard cap on generated scenarios while
    // hunting tail hits, as a multiple of `samples` (fail loudly rather than
    // spin forever on a dead threshold).
    std::size_t max_scenario_factor = 4096;
};

struct McLedger {
    std::uint64_t scenarios = 0;
    std::uint64_t normal_draws = 0;
    std::uint64_t bernoulli_draws = 0;
};

struct McScenario {
    double x0 = 0.0;
    std::uint32_t defaults = 0;
    double loss = 0.0;
};

// One scenario: draw X0, then each obligor's default flag from its
// conditional probability. `grid` is required in Grid mode.
McScenario sample_scenario(const Portfolio& pf, SplitMix64& rng, X0Mode mode,
                           const DiscreteSN* grid, McLedger& ledger);

struct McValueEstimate {
    double value = 0.0;
    double std_error = 0.0;
    McLedger ledger;
};

struct McContribEstimate {
    std::vector<double> values;      // per-group tail-conditional means
    std::vector<double> std_errors;  // per-group standard errors
    double tail_prob_hat = 0.0;      // empirical Pr(L >= v)
    std::size_t tail_hits = 0;
    McLedger ledger;
};

// Empirical VaR under the same convention as the exact enumerator: the
// smallest sampled loss whose empirical exceedance probability is at most
// alpha (config.samples = N, requiring N >= 100 and N*alpha >= 10; for a
// continuous loss law this is the ceil((1-alpha)N)-th order statistic, and
// on atomic laws it matches the enumerator's value-at-risk). Throws
// stat_error when even the maximal sampled loss exceeds the alpha mass.
// The standard error is distribution-free, from the loss spread across the
// +-1.96*sqrt(N*alpha*(1-alpha)) order-statistic band.
McValueEstimate estimate_var(const Portfolio& pf, double alpha, const McConfig& config,
                             const DiscreteSN* grid = nullptr);

// Tail-conditional group means: scenarios are generated until
// config.samples hits land in {L >= v} (the ledger shows the ~N/p blow-up).
// Zero hits within the scenario cap is an error naming the implied bound on
// the tail probability.
McContribEstimate estimate_cvar_contribs(const Portfolio& pf, const GroupPartition& groups,
                                         double threshold, const McConfig& config,
                                         const DiscreteSN* grid = nullptr);

// Classical sample-count figure sigma_max^2 * ln(n_groups/delta) / (eps^2 p),
// rounded up; the constant in front is 1 by convention.
std::uint64_t classical_sample_budget(double sigma_max, double eps, double p,
                                      std::size_t n_groups, double delta);

}  // namespace qrc
