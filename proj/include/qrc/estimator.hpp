#pragma once

#include <cstdint>
#include <vector>

#include "qrc/amplify.hpp"
#include "qrc/oracles.hpp"

namespace qrc {

enum class EstimatorMode { Exact, Surrogate, PerGroupAE };

// How the surrogate perturbs the exact means: uniform on [-B, B] (default;
// respects the error contract with probability one) or a centered Gaussian
// truncated to the same interval.
enum class SurrogateNoise { Uniform, TruncatedGaussian };

struct ContributionEstimate {
    std::vector<double> raw;        // estimates of E[xi_K] = (1-eps') C_K
    std::vector<double> corrected;  // raw / (1 - eps'), estimates of C_K
    double eps_prime = 0.0;         // flag-0 mass of the prepared state
    EstimatorMode mode = EstimatorMode::Exact;
    // Oracle-call cost of the run under the documented accounting (for the
    // surrogate this is what the black box would consume, not what the
    // emulation spent).
    QueryLedger charged;
    bool corrected_primary = false;
};

// Sample-count parameter n = ceil(2*sqrt(2)*sigma_max*sqrt(n_groups)
// * ln(n_groups/delta) / eps), natural log. Requires the working-regime
// hypothesis eps <= sigma_max * sqrt(n_groups).
std::uint64_t derive_n(double sigma_max, std::size_t n_groups, double delta, double eps);

// Reads the payload means directly off the prepared state (the diagnostic
// mode: zero statistical noise, so discretization and residual effects are
// visible in isolation). Charges one payload application.
ContributionEstimate estimate_exact(const StateVector& state, const GroupPayload& payload,
                                    QueryLedger& ledger);

struct SurrogateParams {
    std::uint64_t n = 0;  // from derive_n
    double delta = 0.0;
    std::uint64_t seed = 0;
    SurrogateNoise noise = SurrogateNoise::Uniform;
};

// Multivariate-mean-estimation surrogate: each exact mean is displaced by an
// independent draw bounded by B = sqrt(trace Sigma~) * ln(n_groups/delta) / n,
// the deviation the sub-Gaussian estimator contract permits at sample count
// n. The charged ledger books n * ceil(log2 n) * ceil(log2(n_groups/delta))
// applications of the amplified oracle and the payload (the documented
// reading of the estimator's near-linear call count), each expanded through
// `per_oracle_call`.
ContributionEstimate estimate_surrogate(const ContributionEstimate& exact,
                                        const std::vector<double>& sigma_tilde_sq,
                                        double sigma_max_sq, const SurrogateParams& params,
                                        const QueryLedger& per_oracle_call);

struct PerGroupAEParams {
    double eps = 0.0;  // absolute target on the contribution, in loss units
    int shots_per_level = 100;
    std::uint64_t seed = 0;
};

// Amplitude estimation group by group: the payload value is loaded onto an
// estimation qubit as arcsin(sqrt(xi_K / E_K)), and the qubit's amplitude is
// recovered by maximum-likelihood estimation over measurement counts at
// geometrically increasing amplification powers 0, 1, 2, 4, ..., 2^(J-1)
// with J = ceil(log2(E_K / eps)). Counts are simulated from the exact
// amplitude; the ledger books one state preparation plus 2m oracle
// applications per shot at power m.
ContributionEstimate estimate_per_group_ae(const AmplifiedOracle& oracle,
                                           const GroupPayload& payload,
                                           const PerGroupAEParams& params);

struct VarianceStats {
    std::vector<double> sigma_sq;        // tail-conditional variance per group
    std::vector<double> sigma_tilde_sq;  // payload variance under the state
    double sigma_max_sq = 0.0;
    double sigma_tilde_max_sq = 0.0;
    double trace_tilde = 0.0;
};

// Variance bookkeeping on both sides: sigma_sq from the enumerated tail law,
// sigma_tilde_sq from the prepared state's payload law.
VarianceStats variance_stats(const StateVector& state, const GroupPayload& payload,
                             const TailMoments& tail);

// The residual-mass identity: a payload with tail-conditional moments
// (m1, m2), diluted by flag-0 mass eps', has variance
// (1-eps') m2 - (1-eps')^2 m1^2.
double xi_variance_from_tail_moments(double m1, double m2, double eps_prime);

}  // namespace qrc
