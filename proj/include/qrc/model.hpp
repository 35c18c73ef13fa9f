#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qrc {

// One name in the pool. `threshold` is the default barrier z_k on the latent
// variable: the obligor defaults when a_k*X0 + sqrt(1-a_k^2)*X_k < z_k, with
// X0 the systemic factor and X_k idiosyncratic, both standard normal.
struct Obligor {
    double exposure = 0.0;   // loss amount on default, > 0
    double threshold = 0.0;  // latent default barrier z_k
    double loading = 0.0;    // systemic factor loading a_k, in (0, 1)
};

struct Portfolio {
    std::vector<Obligor> obligors;

    std::size_t size() const { return obligors.size(); }
    double total_exposure() const;
};

// Throws std::invalid_argument on empty pool, non-positive exposures, or
// loadings outside [1e-9, 1 - 1e-9] (the open-interval requirement with a
// numerical margin, so sqrt(1 - a^2) stays well away from 0).
void validate(const Portfolio& pf);

// Contiguous grouping of the obligor index range. Group K covers
// [offset(K), offset(K+1)).
class GroupPartition {
  public:
    static GroupPartition from_sizes(const std::vector<std::size_t>& sizes,
                                     std::size_t n_obligors);
    static GroupPartition single(std::size_t n_obligors);

    std::size_t n_groups() const { return sizes_.size(); }
    std::size_t size(std::size_t k) const { return sizes_[k]; }
    std::size_t begin(std::size_t k) const { return offsets_[k]; }
    std::size_t end(std::size_t k) const { return offsets_[k + 1]; }
    std::size_t n_obligors() const { return offsets_.back(); }

  private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
};

// Standard normal CDF built on the rational erf approximation
// 1 - (1 + a1 x + ... + a6 x^6)^-16 (absolute error below 3e-7), extended to
// negative arguments by erf(-x) = -erf(x) and clamped to [0,1]. Every
// default-probability evaluation in the project (exact enumeration, Monte
// Carlo, and the simulated oracles) goes through this one function, so the
// approximation error cancels out of all cross-path comparisons.
double std_normal_cdf(double x);

// Inverse of std_normal_cdf by bisection to an argument tolerance of 1e-12.
// q must lie strictly inside (0, 1).
double inverse_std_normal_cdf(double q);

// P[default | X0 = x0] = Phi((z_k - a_k x0) / sqrt(1 - a_k^2)).
double conditional_default_prob(const Obligor& ob, double x0);

// Loss for a default pattern given as a bitmask (bit k set = obligor k in
// default). Masks keep the scenario labels compact; the pool size is capped
// well below 32 by the state-space guard.
double portfolio_loss(const Portfolio& pf, std::uint32_t defaults);
double group_loss(const Portfolio& pf, const GroupPartition& groups,
                  std::size_t group, std::uint32_t defaults);

// Equally spaced discretization of the standard normal on [-D, D]:
// x_i = -D + 2D*i/(N-1). Cell probabilities are CDF differences at the cell
// midpoints; the first and last cells absorb the tails and the last
// probability is taken as the complement, so the probabilities sum to 1
// exactly and are symmetric about 0.
struct DiscreteSN {
    std::vector<double> points;
    std::vector<double> probs;
    double half_width = 0.0;

    std::size_t size() const { return points.size(); }
};

DiscreteSN discretize_std_normal(std::size_t n_points, double half_width);

// Full tail-risk report from exact enumeration. `var`-related fields are
// populated only when a VaR level was requested.
struct RiskReport {
    std::optional<double> var_level;      // alpha
    std::optional<double> var;            // V_alpha (a realized loss value)
    double cvar_threshold = 0.0;          // v
    double tail_prob = 0.0;               // p = Pr(L >= v)
    double cvar = 0.0;                    // E[L | L >= v]
    std::vector<double> cvar_contribs;    // E[L_K | L >= v] per group
    std::vector<double> var_contribs;     // E[L_K | L = V_alpha], if alpha set
};

// What to compute: at least one of `alpha` and `threshold` must be set. With
// only alpha, the CVaR threshold defaults to V_alpha.
struct ExactQuery {
    std::optional<double> alpha;
    std::optional<double> threshold;
};

// Per-group conditional moments of the group loss on the tail {L >= v},
// under the discretized model law. m1/m2 are first/second moments of L_K
// given the tail; sigma_sq the conditional variance.
struct TailMoments {
    double tail_prob = 0.0;
    std::vector<double> m1;
    std::vector<double> m2;
    std::vector<double> sigma_sq;
    std::vector<double> group_exposure;  // E_K = sum of exposures in group K
};

// Exhaustive enumeration over grid cells x default patterns. The state space
// N_SN * 2^n must stay within 2^24; larger requests are refused with
// guard_error. Probability weights accumulate through compensated sums.
RiskReport enumerate_exact(const Portfolio& pf, const DiscreteSN& grid,
                           const GroupPartition& groups, const ExactQuery& query);

TailMoments exact_tail_moments(const Portfolio& pf, const DiscreteSN& grid,
                               const GroupPartition& groups, double threshold);

// Joint probability of one scenario label: P(i; y) = p_i * prod_k P_k(x_i)^{y_k}
// (1-P_k(x_i))^{1-y_k}. Used by tests to compare simulator amplitudes against
// the model law cell by cell.
double scenario_probability(const Portfolio& pf, const DiscreteSN& grid,
                            std::size_t cell, std::uint32_t defaults);

// Marginal law of the default pattern (summed over grid cells), indexed by
// mask. Size 2^n; subject to the same state-space guard.
std::vector<double> default_pattern_law(const Portfolio& pf, const DiscreteSN& grid);

}  // namespace qrc
