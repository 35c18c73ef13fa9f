#include "qrc/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qrc/numerics.hpp"

namespace qrc {

namespace {

double draw_x0(SplitMix64& rng, X0Mode mode, const DiscreteSN* grid) {
    switch (mode) {
        case X0Mode::ExactPolar:
            return rng.normal_polar();
        case X0Mode::ApproxInverseCdf: {
            // One uniform through the bisected inverse of the shared CDF.
            double u;
            do {
                u = rng.uniform01();
            } while (u <= 0.0);
            return inverse_std_normal_cdf(u);
        }
        case X0Mode::Grid: {
            if (grid == nullptr)
                throw std::invalid_argument("sample_scenario: Grid mode needs a DiscreteSN");
            double u = rng.uniform01();
            // Inverse-CDF walk over the cell law; the last cell absorbs any
            // residual rounding.
            for (std::size_t i = 0; i + 1 < grid->size(); ++i) {
                if (u < grid->probs[i]) return grid->points[i];
                u -= grid->probs[i];
            }
            return grid->points[grid->size() - 1];
        }
    }
    throw std::logic_error("sample_scenario: bad mode");
}

}  // namespace

McScenario sample_scenario(const Portfolio& pf, SplitMix64& rng, X0Mode mode,
                           const DiscreteSN* grid, McLedger& ledger) {
    McScenario sc;
    sc.x0 = draw_x0(rng, mode, grid);
    ledger.normal_draws += 1;
    for (std::size_t k = 0; k < pf.size(); ++k) {
        const double pk = conditional_default_prob(pf.obligors[k], sc.x0);
        ledger.bernoulli_draws += 1;
        if (rng.bernoulli(pk)) {
            sc.defaults |= (1u << k);
            sc.loss += pf.obligors[k].exposure;
        }
    }
    ledger.scenarios += 1;
    return sc;
}

McValueEstimate estimate_var(const Portfolio& pf, double alpha, const McConfig& config,
                             const DiscreteSN* grid) {
    validate(pf);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("estimate_var: alpha must be in (0,1)");
    const std::size_t n = config.samples;
    if (n < 100 || static_cast<double>(n) * alpha < 10.0)
        throw std::invalid_argument("estimate_var: need samples >= 100 and samples*alpha >= 10");

    SplitMix64 rng(config.seed, 0);
    McValueEstimate est;
    std::vector<double> losses(n);
    for (std::size_t i = 0; i < n; ++i)
        losses[i] = sample_scenario(pf, rng, config.x0_mode, grid, est.ledger).loss;
    std::sort(losses.begin(), losses.end());

    // Empirical analogue of the exact convention (smallest realized loss
    // whose exceedance probability is at most alpha): a value t is
    // admissible iff #{L_i >= t} <= alpha*n, i.e. at least k = ceil((1-a)n)
    // samples fall strictly below t, i.e. t > losses[k-1]. The estimate is
    // the smallest sample value above losses[k-1]; for continuous losses
    // this reduces to the order statistic losses[k].
    const std::size_t k =
        static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(n)));
    const auto it = std::upper_bound(losses.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                                     losses.end(), losses[k - 1]);
    if (it == losses.end())
        throw stat_error("estimate_var: the maximal sampled loss carries more than alpha "
                         "empirical mass; the level is undefined on this sample");
    est.value = *it;

    const double band = 1.96 * std::sqrt(static_cast<double>(n) * alpha * (1.0 - alpha));
    const std::size_t lo = k > static_cast<std::size_t>(band) + 1
                               ? k - static_cast<std::size_t>(band) - 1
                               : 0;
    const std::size_t hi = std::min(n - 1, k + static_cast<std::size_t>(band));
    est.std_error = (losses[hi] - losses[lo]) / (2.0 * 1.96);
    return est;
}

McContribEstimate estimate_cvar_contribs(const Portfolio& pf, const GroupPartition& groups,
                                         double threshold, const McConfig& config,
                                         const DiscreteSN* grid) {
    validate(pf);
    if (groups.n_obligors() != pf.size())
        throw std::invalid_argument("estimate_cvar_contribs: partition does not match pool");
    if (config.samples == 0)
        throw std::invalid_argument("estimate_cvar_contribs: samples must be > 0");

    SplitMix64 rng(config.seed, 0);
    const std::size_t n_gr = groups.n_groups();
    std::vector<MomentAccumulator> acc(n_gr);
    McContribEstimate est;

    const std::size_t cap = config.samples * config.max_scenario_factor;
    while (est.tail_hits < config.samples && est.ledger.scenarios < cap) {
        const McScenario sc = sample_scenario(pf, rng, config.x0_mode, grid, est.ledger);
        if (sc.loss < threshold) continue;
        est.tail_hits += 1;
        for (std::size_t g = 0; g < n_gr; ++g)
            acc[g].add(group_loss(pf, groups, g, sc.defaults));
    }
    if (est.tail_hits == 0) {
        // Rule-of-three bound: zero hits in M scenarios puts p below ~3/M at
        // 95% confidence.
        throw stat_error("estimate_cvar_contribs: no tail hits in " +
                         std::to_string(est.ledger.scenarios) +
                         " scenarios (tail probability < " +
                         std::to_string(3.0 / static_cast<double>(est.ledger.scenarios)) + ")");
    }

    est.tail_prob_hat =
        static_cast<double>(est.tail_hits) / static_cast<double>(est.ledger.scenarios);
    est.values.resize(n_gr);
    est.std_errors.resize(n_gr);
    for (std::size_t g = 0; g < n_gr; ++g) {
        est.values[g] = acc[g].mean();
        est.std_errors[g] = est.tail_hits >= 2 ? acc[g].std_error() : 0.0;
    }
    return est;
}

std::uint64_t classical_sample_budget(double sigma_max, double eps, double p,
                                      std::size_t n_groups, double delta) {
    if (!(sigma_max > 0.0 && eps > 0.0 && p > 0.0 && p <= 1.0 && delta > 0.0 && delta < 1.0) ||
        n_groups == 0)
        throw std::invalid_argument("classical_sample_budget: bad parameters");
    const double figure = sigma_max * sigma_max *
                          std::log(static_cast<double>(n_groups) / delta) / (eps * eps * p);
    return static_cast<std::uint64_t>(std::ceil(figure));
}

}  // namespace qrc
