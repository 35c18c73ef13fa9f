// Estimator tests: the derived sample count, the exact readout, the
// bounded-noise surrogate with its charged-call accounting, amplitude
// estimation with maximum-likelihood recovery, and the variance identities
// connecting the state to the enumerated tail.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "qrc/amplify.hpp"
#include "qrc/estimator.hpp"
#include "qrc/model.hpp"
#include "qrc/numerics.hpp"
#include "qrc/oracles.hpp"
#include "qrc/qsim.hpp"

using namespace qrc;

namespace {

constexpr double kGoldenTailProb = 0.3157357969822585;
constexpr double kGoldenContrib1 = 0.5922870475817211;
constexpr double kGoldenContrib2 = 8.275855536524592;
constexpr double kGoldenSigma1 = 1.19417636721386;
constexpr double kGoldenSigma2 = 2.3292314500499796;

Portfolio golden_portfolio() {
    Portfolio pf;
    pf.obligors = {{3.0, inverse_std_normal_cdf(0.1), 0.5},
                   {5.0, inverse_std_normal_cdf(0.2), 0.5},
                   {7.0, inverse_std_normal_cdf(0.3), 0.5}};
    return pf;
}

struct GoldenPipeline {
    TailOracle oracle;
    AmplifiedOracle amplified;
    GroupPayload payload;
    TailMoments tail;
    StateVector state;
    QueryLedger prep_ledger;

    static GoldenPipeline build(const FixedPointFormat& fmt) {
        const Portfolio pf = golden_portfolio();
        const DiscreteSN grid = discretize_std_normal(16, 4.0);
        const GroupPartition gp = GroupPartition::from_sizes({1, 2}, 3);

        TailOracleSpec spec;
        spec.portfolio = pf;
        spec.grid = grid;
        spec.threshold = 7.0;
        spec.format = fmt;
        TailOracle oracle = TailOracle::build(spec);

        TailMoments tail = exact_tail_moments(pf, grid, gp, 7.0);
        const double sigma_max = std::sqrt(
            *std::max_element(tail.sigma_sq.begin(), tail.sigma_sq.end()));
        const double c_max = *std::max_element(tail.m1.begin(), tail.m1.end());
        const double e_max = *std::max_element(tail.group_exposure.begin(),
                                               tail.group_exposure.end());
        const EpsPrimeBudget budget(0.1, c_max, sigma_max, e_max);
        AmplifiedOracle amplified =
            AmplifiedOracle::build(oracle, oracle.tail_prob(), budget);

        GroupPayload payload = GroupPayload::build(pf, gp, fmt);

        StateVector st = StateVector::zero_state(oracle.basis());
        QueryLedger ledger;
        amplified.apply(st, ledger);
        return GoldenPipeline{std::move(oracle), std::move(amplified), std::move(payload),
                              std::move(tail), std::move(st), ledger};
    }
};

}  // namespace

TEST_CASE("derived sample count") {
    // ceil(2*sqrt(2)*sigma*sqrt(N)*ln(N/delta)/eps) at sigma=1, N=4,
    // delta=0.01, eps=0.1: ceil(2*sqrt(2)*2*ln(400)/0.1) = 339.
    CHECK(derive_n(1.0, 4, 0.01, 0.1) == 339);
    // Halving eps doubles the count (up to the ceiling).
    CHECK(derive_n(1.0, 4, 0.01, 0.05) == 678);
    // The working-regime hypothesis eps <= sigma*sqrt(N) is enforced.
    CHECK_THROWS_AS((void)derive_n(0.01, 1, 0.01, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)derive_n(1.0, 4, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)derive_n(1.0, 0, 0.01, 0.1), std::invalid_argument);
}

TEST_CASE("exact readout corrects the residual dilution") {
    GoldenPipeline pipe = GoldenPipeline::build(FixedPointFormat(32, 24));
    QueryLedger ledger;
    const ContributionEstimate est = estimate_exact(pipe.state, pipe.payload, ledger);
    CHECK(ledger.uxi_calls == 1);

    CHECK(est.mode == EstimatorMode::Exact);
    CHECK(est.eps_prime < pipe.amplified.cap());
    CHECK(est.eps_prime > 0.0);
    REQUIRE(est.corrected.size() == 2);

    // raw = (1 - eps') * C_K exactly on the prepared state; corrected
    // recovers the tail-conditional contribution up to register rounding.
    CHECK(std::abs(est.raw[0] - (1.0 - est.eps_prime) * est.corrected[0]) <= 1e-14);
    CHECK(std::abs(est.corrected[0] - kGoldenContrib1) <= 1e-6);
    CHECK(std::abs(est.corrected[1] - kGoldenContrib2) <= 1e-6);

    // At the fine format the corrected readout is tight.
    GoldenPipeline fine = GoldenPipeline::build(FixedPointFormat(56, 46));
    QueryLedger ledger2;
    const ContributionEstimate est2 = estimate_exact(fine.state, fine.payload, ledger2);
    CHECK(std::abs(est2.corrected[0] - kGoldenContrib1) <= 1e-9);
    CHECK(std::abs(est2.corrected[1] - kGoldenContrib2) <= 1e-9);
}

TEST_CASE("variance identities between state and enumerated tail") {
    GoldenPipeline pipe = GoldenPipeline::build(FixedPointFormat(56, 46));
    const VarianceStats vs = variance_stats(pipe.state, pipe.payload, pipe.tail);

    REQUIRE(vs.sigma_sq.size() == 2);
    CHECK(std::abs(std::sqrt(vs.sigma_sq[0]) - kGoldenSigma1) <= 1e-9);
    CHECK(std::abs(std::sqrt(vs.sigma_sq[1]) - kGoldenSigma2) <= 1e-9);
    CHECK(vs.sigma_max_sq == doctest::Approx(kGoldenSigma2 * kGoldenSigma2).epsilon(1e-9));

    // The payload variance under the prepared state obeys the dilution
    // identity with the enumerated tail moments at the realized residual.
    QueryLedger scratch;
    const ContributionEstimate est = estimate_exact(pipe.state, pipe.payload, scratch);
    for (std::size_t g = 0; g < 2; ++g) {
        const double want =
            xi_variance_from_tail_moments(pipe.tail.m1[g], pipe.tail.m2[g], est.eps_prime);
        CHECK(std::abs(vs.sigma_tilde_sq[g] - want) <= 1e-9);
        // Dilution can only add the mean-square spread once:
        // sigma~^2 <= sigma^2 + m1^2 <= sigma^2 + sigma_max-style bounds.
        CHECK(vs.sigma_tilde_sq[g] <=
              vs.sigma_sq[g] + pipe.tail.m1[g] * pipe.tail.m1[g] + 1e-12);
    }
    CHECK(vs.trace_tilde == doctest::Approx(vs.sigma_tilde_sq[0] + vs.sigma_tilde_sq[1])
                                .epsilon(1e-12));
    CHECK(vs.sigma_tilde_max_sq ==
          doctest::Approx(std::max(vs.sigma_tilde_sq[0], vs.sigma_tilde_sq[1]))
              .epsilon(1e-12));
}

TEST_CASE("dilution identity closed form") {
    // (1-e) m2 - (1-e)^2 m1^2, checked against a two-point law: payout x
    // with probability (1-e), zero otherwise.
    for (double e : {0.0, 0.01, 0.3}) {
        for (double x : {0.5, 2.0}) {
            const double m1 = x, m2 = x * x;
            const double mean = (1.0 - e) * x;
            const double var = (1.0 - e) * x * x - mean * mean;
            CHECK(xi_variance_from_tail_moments(m1, m2, e) ==
                  doctest::Approx(var).epsilon(1e-14));
        }
    }
}

TEST_CASE("surrogate noise respects the deviation bound") {
    GoldenPipeline pipe = GoldenPipeline::build(FixedPointFormat(32, 24));
    QueryLedger scratch;
    const ContributionEstimate exact = estimate_exact(pipe.state, pipe.payload, scratch);
    const VarianceStats vs = variance_stats(pipe.state, pipe.payload, pipe.tail);

    const double eps = 0.1, delta = 0.01;
    const double sigma_max = std::sqrt(vs.sigma_max_sq);

    SurrogateParams params;
    params.n = derive_n(sigma_max, 2, delta, eps);
    params.delta = delta;

    const QueryLedger per_call = pipe.prep_ledger;  // one preparation

    const double bound = std::sqrt(vs.trace_tilde) *
                         std::log(2.0 / delta) / static_cast<double>(params.n);
    CHECK(bound <= eps / 2.0);  // the contract the derivation guarantees

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        params.seed = seed;
        params.noise = (seed % 2 == 0) ? SurrogateNoise::Uniform
                                       : SurrogateNoise::TruncatedGaussian;
        const ContributionEstimate est = estimate_surrogate(
            exact, vs.sigma_tilde_sq, vs.sigma_max_sq, params, per_call);
        CHECK(est.mode == EstimatorMode::Surrogate);
        for (std::size_t g = 0; g < 2; ++g) {
            CHECK(std::abs(est.raw[g] - exact.raw[g]) <= bound + 1e-15);
            const double truth = (g == 0) ? kGoldenContrib1 : kGoldenContrib2;
            CHECK(std::abs(est.corrected[g] - truth) <= eps);
        }
    }

    // Same seed, same draw.
    params.seed = 7;
    params.noise = SurrogateNoise::Uniform;
    const ContributionEstimate a = estimate_surrogate(exact, vs.sigma_tilde_sq,
                                                      vs.sigma_max_sq, params, per_call);
    const ContributionEstimate b = estimate_surrogate(exact, vs.sigma_tilde_sq,
                                                      vs.sigma_max_sq, params, per_call);
    CHECK(a.raw[0] == b.raw[0]);
    CHECK(a.raw[1] == b.raw[1]);
}

TEST_CASE("surrogate charged-call accounting") {
    GoldenPipeline pipe = GoldenPipeline::build(FixedPointFormat(32, 24));
    QueryLedger scratch;
    const ContributionEstimate exact = estimate_exact(pipe.state, pipe.payload, scratch);
    const VarianceStats vs = variance_stats(pipe.state, pipe.payload, pipe.tail);

    SurrogateParams params;
    params.n = 494;  // derive_n at the realized sigma_max
    params.delta = 0.01;
    params.seed = 3;

    QueryLedger per_call;
    per_call.uxi_calls = 1;
    per_call.usn_calls = 7;

    const ContributionEstimate est = estimate_surrogate(
        exact, vs.sigma_tilde_sq, vs.sigma_max_sq, params, per_call);
    // n * ceil(log2 n) * ceil(log2(n_groups/delta)) = 494 * 9 * 8.
    CHECK(est.charged.uxi_calls == 35568);
    CHECK(est.charged.usn_calls == 35568u * 7u);
}

TEST_CASE("surrogate input validation") {
    GoldenPipeline pipe = GoldenPipeline::build(FixedPointFormat(32, 24));
    QueryLedger scratch;
    const ContributionEstimate exact = estimate_exact(pipe.state, pipe.payload, scratch);
    const VarianceStats vs = variance_stats(pipe.state, pipe.payload, pipe.tail);
    const QueryLedger per_call = pipe.prep_ledger;

    SurrogateParams params;
    params.delta = 0.01;
    params.n = 2;  // below ln(n_groups/delta) ~ 5.3
    CHECK_THROWS_AS((void)estimate_surrogate(exact, vs.sigma_tilde_sq, vs.sigma_max_sq,
                                             params, per_call),
                    std::invalid_argument);

    // A variance vector inconsistent with the claimed bound is refused.
    params.n = 300;
    std::vector<double> inflated = vs.sigma_tilde_sq;
    inflated[1] = 10.0 * vs.sigma_max_sq;
    CHECK_THROWS_AS((void)estimate_surrogate(exact, inflated, vs.sigma_max_sq, params,
                                             per_call),
                    stat_error);
}

TEST_CASE("per-group amplitude estimation recovers the contributions") {
    GoldenPipeline pipe = GoldenPipeline::build(FixedPointFormat(32, 24));

    PerGroupAEParams params;
    params.eps = 0.1;
    params.shots_per_level = 100;
    params.seed = 20240615;

    const ContributionEstimate est = estimate_per_group_ae(pipe.amplified, pipe.payload,
                                                           params);
    CHECK(est.mode == EstimatorMode::PerGroupAE);
    REQUIRE(est.corrected.size() == 2);
    // MLE at these shot counts should land well inside a few eps.
    CHECK(std::abs(est.corrected[0] - kGoldenContrib1) <= 3.0 * params.eps);
    CHECK(std::abs(est.corrected[1] - kGoldenContrib2) <= 3.0 * params.eps);

    // Determinism under a fixed seed.
    const ContributionEstimate again = estimate_per_group_ae(pipe.amplified, pipe.payload,
                                                             params);
    CHECK(est.corrected[0] == again.corrected[0]);
    CHECK(est.corrected[1] == again.corrected[1]);
}

TEST_CASE("amplitude-estimation schedule depth and charged calls") {
    GoldenPipeline pipe = GoldenPipeline::build(FixedPointFormat(32, 24));

    PerGroupAEParams params;
    params.eps = 0.1;
    params.shots_per_level = 100;
    params.seed = 11;

    // Levels J = ceil(log2(E_K/eps)): E_1 = 3 -> 5 levels, E_2 = 12 -> 7.
    // Preparations per group: shots * sum(1 + 2m) over powers
    // m = 0,1,2,...,2^(J-1); J=5 -> 68, J=7 -> 262; total 100*(68+262).
    const ContributionEstimate est = estimate_per_group_ae(pipe.amplified, pipe.payload,
                                                           params);
    const std::uint64_t len = static_cast<std::uint64_t>(pipe.amplified.schedule().length);
    const std::uint64_t preps = 33000;
    CHECK(est.charged.uxi_calls == preps);
    CHECK(est.charged.ugev_calls == preps * len);

    // Halving eps adds one level per group and roughly doubles the calls.
    PerGroupAEParams fine = params;
    fine.eps = 0.05;
    const ContributionEstimate est2 = estimate_per_group_ae(pipe.amplified, pipe.payload,
                                                            fine);
    const double ratio = static_cast<double>(est2.charged.ugev_calls) /
                         static_cast<double>(est.charged.ugev_calls);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 3.0);

    CHECK_THROWS_AS((void)estimate_per_group_ae(pipe.amplified, pipe.payload,
                                                PerGroupAEParams{0.0, 100, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_per_group_ae(pipe.amplified, pipe.payload,
                                                PerGroupAEParams{0.1, 0, 1}),
                    std::invalid_argument);
}
