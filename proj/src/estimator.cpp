#include "qrc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qrc/numerics.hpp"
#include "qrc/rng.hpp"

namespace qrc {

namespace {

std::uint64_t ceil_log2(std::uint64_t x) {
    std::uint64_t bits = 0;
    while ((std::uint64_t{1} << bits) < x) ++bits;
    return bits;
}

}  // namespace

std::uint64_t derive_n(double sigma_max, std::size_t n_groups, double delta, double eps) {
    if (!(sigma_max > 0.0) || n_groups == 0 || !(delta > 0.0 && delta < 1.0) || !(eps > 0.0))
        throw std::invalid_argument("derive_n: bad parameters");
    const double root_gr = std::sqrt(static_cast<double>(n_groups));
    if (eps > sigma_max * root_gr)
        throw std::invalid_argument("derive_n: eps exceeds sigma_max*sqrt(n_groups); outside "
                                    "the estimator's working regime");
    const double log_term = std::log(static_cast<double>(n_groups) / delta);
    const double n = std::ceil(2.0 * std::sqrt(2.0) * sigma_max * root_gr * log_term / eps);
    return static_cast<std::uint64_t>(n);
}

ContributionEstimate estimate_exact(const StateVector& state, const GroupPayload& payload,
                                    QueryLedger& ledger) {
    const AnnotatedState view = apply_u_xi(state, payload, ledger);
    ContributionEstimate est;
    est.mode = EstimatorMode::Exact;
    est.eps_prime = view.flag0_mass();
    const std::size_t n_gr = payload.n_groups();
    est.raw.resize(n_gr);
    est.corrected.resize(n_gr);
    for (std::size_t g = 0; g < n_gr; ++g) {
        est.raw[g] = view.expectation(g);
        est.corrected[g] = est.raw[g] / (1.0 - est.eps_prime);
    }
    return est;
}

ContributionEstimate estimate_surrogate(const ContributionEstimate& exact,
                                        const std::vector<double>& sigma_tilde_sq,
                                        double sigma_max_sq, const SurrogateParams& params,
                                        const QueryLedger& per_oracle_call) {
    const std::size_t n_gr = exact.raw.size();
    if (sigma_tilde_sq.size() != n_gr)
        throw std::invalid_argument("estimate_surrogate: variance vector size mismatch");
    if (!(params.delta > 0.0 && params.delta < 1.0))
        throw std::invalid_argument("estimate_surrogate: delta must be in (0,1)");
    const double log_term = std::log(static_cast<double>(n_gr) / params.delta);
    if (params.n == 0 || static_cast<double>(params.n) < log_term)
        throw std::invalid_argument("estimate_surrogate: n below the estimator's minimum "
                                    "sample count");

    KahanSum tr;
    for (double s : sigma_tilde_sq) {
        if (s < -1e-12) throw std::invalid_argument("estimate_surrogate: negative variance");
        tr.add(std::max(0.0, s));
    }
    const double trace = tr.value();
    // Residual dilution can inflate each variance by at most sigma_max^2.
    if (trace > 2.0 * static_cast<double>(n_gr) * sigma_max_sq * (1.0 + 1e-9))
        throw stat_error("estimate_surrogate: payload variance trace exceeds its bound; "
                         "the prepared state is inconsistent with the model law");

    const double bound = std::sqrt(trace) * log_term / static_cast<double>(params.n);

    SplitMix64 rng(params.seed, 0);
    ContributionEstimate est;
    est.mode = EstimatorMode::Surrogate;
    est.eps_prime = exact.eps_prime;
    est.raw.resize(n_gr);
    est.corrected.resize(n_gr);
    for (std::size_t g = 0; g < n_gr; ++g) {
        double noise = 0.0;
        if (params.noise == SurrogateNoise::Uniform) {
            noise = rng.uniform(-bound, bound);
        } else {
            // Centered Gaussian with sd = bound/2, redrawn into [-bound, bound].
            do {
                noise = 0.5 * bound * rng.normal_polar();
            } while (std::abs(noise) > bound);
        }
        est.raw[g] = exact.raw[g] + noise;
        est.corrected[g] = est.raw[g] / (1.0 - est.eps_prime);
    }

    const std::uint64_t polylog =
        ceil_log2(std::max<std::uint64_t>(2, params.n)) *
        static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(n_gr) / params.delta)));
    est.charged = per_oracle_call.scaled(params.n * std::max<std::uint64_t>(1, polylog));
    return est;
}

namespace {

// Negative log-likelihood machinery for the amplitude MLE.
struct AELevel {
    int power = 0;  // amplification rounds m
    int hits = 0;
    int shots = 0;
};

double log_likelihood(double theta, const std::vector<AELevel>& levels) {
    double ll = 0.0;
    for (const auto& lv : levels) {
        const double s = std::sin(static_cast<double>(2 * lv.power + 1) * theta);
        const double p = std::min(1.0 - 1e-15, std::max(1e-15, s * s));
        ll += lv.hits * std::log(p) + (lv.shots - lv.hits) * std::log1p(-p);
    }
    return ll;
}

double mle_theta(const std::vector<AELevel>& levels) {
    // Coarse scan then golden-section refinement around the best cell. The
    // likelihood oscillates at scale 1/max_power, so the grid must resolve
    // well below that.
    int max_power = 1;
    for (const auto& lv : levels) max_power = std::max(max_power, lv.power);
    const int grid = std::max(20000, 200 * max_power);
    double best_theta = 0.0, best_ll = -HUGE_VAL;
    for (int i = 0; i <= grid; ++i) {
        const double theta = 0.5 * std::numbers::pi * static_cast<double>(i) / grid;
        const double ll = log_likelihood(theta, levels);
        if (ll > best_ll) {
            best_ll = ll;
            best_theta = theta;
        }
    }
    double lo = std::max(0.0, best_theta - 0.5 * std::numbers::pi / grid);
    double hi = std::min(0.5 * std::numbers::pi, best_theta + 0.5 * std::numbers::pi / grid);
    constexpr double kGolden = 0.61803398874989485;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = log_likelihood(x1, levels);
    double f2 = log_likelihood(x2, levels);
    while (hi - lo > 1e-13) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = log_likelihood(x2, levels);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = log_likelihood(x1, levels);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ContributionEstimate estimate_per_group_ae(const AmplifiedOracle& oracle,
                                           const GroupPayload& payload,
                                           const PerGroupAEParams& params) {
    if (!(params.eps > 0.0)) throw std::invalid_argument("estimate_per_group_ae: eps must be > 0");
    if (params.shots_per_level < 2)
        throw std::invalid_argument("estimate_per_group_ae: need at least 2 shots per level");

    // One emulation build of the amplified state gives the exact amplitudes
    // the hardware run would realize; measurement statistics are then drawn
    // from the exact Born law at each amplification power.
    QueryLedger build_ledger;
    StateVector state = StateVector::zero_state(oracle.base().basis());
    oracle.apply(state, build_ledger);
    QueryLedger per_up = build_ledger;  // cost of one amplified preparation
    const AnnotatedState view = apply_u_xi(state, payload, per_up);

    ContributionEstimate est;
    est.mode = EstimatorMode::PerGroupAE;
    est.corrected_primary = true;
    est.eps_prime = view.flag0_mass();
    const std::size_t n_gr = payload.n_groups();
    est.raw.resize(n_gr);
    est.corrected.resize(n_gr);

    for (std::size_t g = 0; g < n_gr; ++g) {
        const double e_k = payload.group_exposure(g);
        if (!(params.eps < e_k))
            throw std::invalid_argument("estimate_per_group_ae: eps must be below the group "
                                        "exposure E_K");
        const double a = std::min(1.0, std::max(0.0, view.expectation(g) / e_k));
        const double theta_true = std::asin(std::sqrt(a));

        const int levels_count =
            std::max(1, static_cast<int>(std::ceil(std::log2(e_k / params.eps))));
        SplitMix64 rng(params.seed, static_cast<std::uint64_t>(g));

        int shots = params.shots_per_level;
        std::vector<AELevel> levels;
        for (int attempt = 0; attempt < 3; ++attempt) {
            levels.clear();
            levels.push_back({0, 0, shots});
            for (int j = 0; j < levels_count; ++j) levels.push_back({1 << j, 0, shots});
            bool degenerate = true;
            for (auto& lv : levels) {
                const double s = std::sin(static_cast<double>(2 * lv.power + 1) * theta_true);
                const double p_good = s * s;
                for (int t = 0; t < lv.shots; ++t) lv.hits += rng.bernoulli(p_good) ? 1 : 0;
                if (lv.hits != 0 && lv.hits != lv.shots) degenerate = false;
                // Charge: one preparation plus 2 oracle uses per round, for
                // both the amplified preparation and the payload load.
                est.charged += per_up.scaled(static_cast<std::uint64_t>(lv.shots) *
                                             static_cast<std::uint64_t>(1 + 2 * lv.power));
            }
            if (!degenerate) break;
            if (attempt == 2)
                throw stat_error("estimate_per_group_ae: degenerate likelihood (all shots "
                                 "identical) even after widening the schedule");
            shots *= 2;  // widen and retry
        }

        const double theta_hat = mle_theta(levels);
        const double a_hat = std::sin(theta_hat) * std::sin(theta_hat);
        est.raw[g] = e_k * a_hat;
        est.corrected[g] = est.raw[g] / (1.0 - est.eps_prime);
    }
    return est;
}

VarianceStats variance_stats(const StateVector& state, const GroupPayload& payload,
                             const TailMoments& tail) {
    if (tail.m1.size() != payload.n_groups())
        throw std::invalid_argument("variance_stats: group count mismatch");
    QueryLedger scratch;
    const AnnotatedState view = apply_u_xi(state, payload, scratch);
    VarianceStats vs;
    const std::size_t n_gr = payload.n_groups();
    vs.sigma_sq = tail.sigma_sq;
    vs.sigma_tilde_sq.resize(n_gr);
    for (std::size_t g = 0; g < n_gr; ++g) {
        const double m1 = view.expectation(g);
        const double m2 = view.second_moment(g);
        vs.sigma_tilde_sq[g] = std::max(0.0, m2 - m1 * m1);
    }
    vs.sigma_max_sq = *std::max_element(vs.sigma_sq.begin(), vs.sigma_sq.end());
    vs.sigma_tilde_max_sq =
        *std::max_element(vs.sigma_tilde_sq.begin(), vs.sigma_tilde_sq.end());
    KahanSum tr;
    for (double s : vs.sigma_tilde_sq) tr.add(s);
    vs.trace_tilde = tr.value();
    return vs;
}

double xi_variance_from_tail_moments(double m1, double m2, double eps_prime) {
    const double keep = 1.0 - eps_prime;
    return keep * m2 - keep * keep * m1 * m1;
}

}  // namespace qrc
