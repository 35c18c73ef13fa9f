#include "qrc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qrc/numerics.hpp"

namespace qrc {

double Portfolio::total_exposure() const {
    double s = 0.0;
    for (const auto& ob : obligors) s += ob.exposure;
    return s;
}

void validate(const Portfolio& pf) {
    if (pf.obligors.empty()) throw std::invalid_argument("portfolio: empty obligor pool");
    constexpr double kLoadingMargin = 1e-9;
    for (std::size_t k = 0; k < pf.obligors.size(); ++k) {
        const auto& ob = pf.obligors[k];
        if (!(ob.exposure > 0.0))
            throw std::invalid_argument("portfolio: obligor " + std::to_string(k) +
                                        " has non-positive exposure");
        if (!(ob.loading >= kLoadingMargin && ob.loading <= 1.0 - kLoadingMargin))
            throw std::invalid_argument("portfolio: obligor " + std::to_string(k) +
                                        " loading outside [1e-9, 1-1e-9]");
        if (!std::isfinite(ob.threshold))
            throw std::invalid_argument("portfolio: obligor " + std::to_string(k) +
                                        " threshold not finite");
    }
}

GroupPartition GroupPartition::from_sizes(const std::vector<std::size_t>& sizes,
                                          std::size_t n_obligors) {
    if (sizes.empty()) throw std::invalid_argument("partition: no groups");
    GroupPartition gp;
    gp.sizes_ = sizes;
    gp.offsets_.resize(sizes.size() + 1);
    gp.offsets_[0] = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) throw std::invalid_argument("partition: empty group");
        gp.offsets_[k + 1] = gp.offsets_[k] + sizes[k];
    }
    if (gp.offsets_.back() != n_obligors)
        throw std::invalid_argument("partition: group sizes sum to " +
                                    std::to_string(gp.offsets_.back()) + ", expected " +
                                    std::to_string(n_obligors));
    return gp;
}

GroupPartition GroupPartition::single(std::size_t n_obligors) {
    return from_sizes({n_obligors}, n_obligors);
}

namespace {

// erf on x >= 0 via the degree-6 rational approximation; odd extension below.
double erf_approx(double x) {
    static constexpr double kA[6] = {0.0705230784, 0.0422820123, 0.0092705272,
                                     0.0001520143, 0.0002765672, 0.0000430638};
    const double ax = std::abs(x);
    const double p =
        1.0 + ax * (kA[0] + ax * (kA[1] + ax * (kA[2] + ax * (kA[3] + ax * (kA[4] + ax * kA[5])))));
    double p2 = p * p;           // p^2
    p2 *= p2;                    // p^4
    p2 *= p2;                    // p^8
    p2 *= p2;                    // p^16
    const double e = 1.0 - 1.0 / p2;
    return x < 0.0 ? -e : e;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

double std_normal_cdf(double x) {
    const double v = 0.5 * (1.0 + erf_approx(x * kInvSqrt2));
    return std::min(1.0, std::max(0.0, v));
}

double inverse_std_normal_cdf(double q) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("inverse_std_normal_cdf: q must be in (0,1)");
    double lo = -40.0, hi = 40.0;
    // Bisection on a monotone function; 1e-12 argument tolerance.
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (std_normal_cdf(mid) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double conditional_default_prob(const Obligor& ob, double x0) {
    const double denom = std::sqrt(1.0 - ob.loading * ob.loading);
    return std_normal_cdf((ob.threshold - ob.loading * x0) / denom);
}

double portfolio_loss(const Portfolio& pf, std::uint32_t defaults) {
    double loss = 0.0;
    for (std::size_t k = 0; k < pf.size(); ++k) {
        if (defaults & (1u << k)) loss += pf.obligors[k].exposure;
    }
    return loss;
}

double group_loss(const Portfolio& pf, const GroupPartition& groups, std::size_t group,
                  std::uint32_t defaults) {
    double loss = 0.0;
    for (std::size_t k = groups.begin(group); k < groups.end(group); ++k) {
        if (defaults & (1u << k)) loss += pf.obligors[k].exposure;
    }
    return loss;
}

DiscreteSN discretize_std_normal(std::size_t n_points, double half_width) {
    if (n_points < 2) throw std::invalid_argument("discretize_std_normal: need >= 2 points");
    if (!(half_width > 0.0)) throw std::invalid_argument("discretize_std_normal: D must be > 0");
    DiscreteSN d;
    d.half_width = half_width;
    d.points.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        d.points[i] = -half_width +
                      2.0 * half_width * static_cast<double>(i) / static_cast<double>(n_points - 1);
    }
    // Cumulative CDF values at cell midpoints, with 0 and 1 pinned at the
    // ends: differences telescope to exactly 1 and each cell is nonnegative
    // by monotonicity.
    d.probs.resize(n_points);
    double prev = 0.0;
    for (std::size_t i = 0; i + 1 < n_points; ++i) {
        const double mid = 0.5 * (d.points[i] + d.points[i + 1]);
        const double c = std_normal_cdf(mid);
        d.probs[i] = c - prev;
        prev = c;
    }
    d.probs[n_points - 1] = 1.0 - prev;
    return d;
}

namespace {

constexpr std::size_t kStateSpaceGuard = std::size_t{1} << 24;

void check_state_space(const Portfolio& pf, const DiscreteSN& grid) {
    const std::size_t n = pf.size();
    if (n >= 31 || (grid.size() << n) > kStateSpaceGuard)
        throw guard_error("enumeration state space exceeds 2^24 cells");
}

// Marginal probability of each default pattern, built per grid cell by
// tensor doubling: weights(k+1) = weights(k) x (1-P_k, P_k).
std::vector<double> pattern_law(const Portfolio& pf, const DiscreteSN& grid) {
    const std::size_t n = pf.size();
    const std::size_t n_patterns = std::size_t{1} << n;
    std::vector<double> law(n_patterns, 0.0);
    std::vector<double> w(n_patterns);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w[0] = grid.probs[i];
        std::size_t filled = 1;
        for (std::size_t k = 0; k < n; ++k) {
            const double pk = conditional_default_prob(pf.obligors[k], grid.points[i]);
            for (std::size_t m = 0; m < filled; ++m) {
                const double base = w[m];
                w[m] = base * (1.0 - pk);
                w[filled + m] = base * pk;
            }
            filled <<= 1;
        }
        for (std::size_t m = 0; m < n_patterns; ++m) law[m] += w[m];
    }
    return law;
}

}  // namespace

std::vector<double> default_pattern_law(const Portfolio& pf, const DiscreteSN& grid) {
    validate(pf);
    check_state_space(pf, grid);
    return pattern_law(pf, grid);
}

double scenario_probability(const Portfolio& pf, const DiscreteSN& grid, std::size_t cell,
                            std::uint32_t defaults) {
    if (cell >= grid.size()) throw std::invalid_argument("scenario_probability: bad cell index");
    double w = grid.probs[cell];
    for (std::size_t k = 0; k < pf.size(); ++k) {
        const double pk = conditional_default_prob(pf.obligors[k], grid.points[cell]);
        w *= (defaults & (1u << k)) ? pk : (1.0 - pk);
    }
    return w;
}

TailMoments exact_tail_moments(const Portfolio& pf, const DiscreteSN& grid,
                               const GroupPartition& groups, double threshold) {
    validate(pf);
    if (groups.n_obligors() != pf.size())
        throw std::invalid_argument("exact_tail_moments: partition does not match pool size");
    check_state_space(pf, grid);

    const std::vector<double> law = pattern_law(pf, grid);
    const std::size_t n_gr = groups.n_groups();

    KahanSum tail;
    std::vector<KahanSum> s1(n_gr), s2(n_gr);
    for (std::size_t mask = 0; mask < law.size(); ++mask) {
        const std::uint32_t m32 = static_cast<std::uint32_t>(mask);
        if (portfolio_loss(pf, m32) < threshold) continue;
        tail.add(law[mask]);
        for (std::size_t g = 0; g < n_gr; ++g) {
            const double lk = group_loss(pf, groups, g, m32);
            s1[g].add(law[mask] * lk);
            s2[g].add(law[mask] * lk * lk);
        }
    }

    TailMoments tm;
    tm.tail_prob = tail.value();
    if (!(tm.tail_prob > 0.0))
        throw std::invalid_argument("exact_tail_moments: threshold has zero tail probability");
    tm.m1.resize(n_gr);
    tm.m2.resize(n_gr);
    tm.sigma_sq.resize(n_gr);
    tm.group_exposure.resize(n_gr);
    for (std::size_t g = 0; g < n_gr; ++g) {
        tm.m1[g] = s1[g].value() / tm.tail_prob;
        tm.m2[g] = s2[g].value() / tm.tail_prob;
        tm.sigma_sq[g] = std::max(0.0, tm.m2[g] - tm.m1[g] * tm.m1[g]);
        double e = 0.0;
        for (std::size_t k = groups.begin(g); k < groups.end(g); ++k)
            e += pf.obligors[k].exposure;
        tm.group_exposure[g] = e;
    }
    return tm;
}

RiskReport enumerate_exact(const Portfolio& pf, const DiscreteSN& grid,
                           const GroupPartition& groups, const ExactQuery& query) {
    validate(pf);
    if (groups.n_obligors() != pf.size())
        throw std::invalid_argument("enumerate_exact: partition does not match pool size");
    if (!query.alpha && !query.threshold)
        throw std::invalid_argument("enumerate_exact: need alpha or threshold");
    if (query.alpha && !(*query.alpha > 0.0 && *query.alpha < 1.0))
        throw std::invalid_argument("enumerate_exact: alpha must be in (0,1)");
    check_state_space(pf, grid);

    const std::vector<double> law = pattern_law(pf, grid);
    const std::size_t n_gr = groups.n_groups();

    RiskReport report;

    // Distinct realized losses with their atom probabilities, ascending.
    std::map<double, double> atoms;
    for (std::size_t mask = 0; mask < law.size(); ++mask)
        atoms[portfolio_loss(pf, static_cast<std::uint32_t>(mask))] += law[mask];

    if (query.alpha) {
        report.var_level = *query.alpha;
        // V_alpha: the smallest realized loss whose exceedance probability
        // Pr(L >= x) is at most alpha. Tail sums taken from the top so each
        // is a fresh compensated sum of few terms.
        double running = 0.0;
        std::optional<double> var;
        for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
            running += it->second;
            if (running <= *query.alpha) var = it->first;
        }
        if (!var)
            throw std::invalid_argument(
                "enumerate_exact: alpha below the probability of the maximal loss; VaR "
                "undefined on this support");
        report.var = *var;

        // Contributions on the VaR atom: E[L_K | L = V_alpha].
        KahanSum atom_p;
        std::vector<KahanSum> s1(n_gr);
        for (std::size_t mask = 0; mask < law.size(); ++mask) {
            const std::uint32_t m32 = static_cast<std::uint32_t>(mask);
            if (portfolio_loss(pf, m32) != *var) continue;
            atom_p.add(law[mask]);
            for (std::size_t g = 0; g < n_gr; ++g)
                s1[g].add(law[mask] * group_loss(pf, groups, g, m32));
        }
        report.var_contribs.resize(n_gr);
        for (std::size_t g = 0; g < n_gr; ++g)
            report.var_contribs[g] = s1[g].value() / atom_p.value();
    }

    const double v = query.threshold ? *query.threshold : *report.var;
    report.cvar_threshold = v;

    KahanSum tail, total_tail_loss;
    std::vector<KahanSum> s1(n_gr);
    for (std::size_t mask = 0; mask < law.size(); ++mask) {
        const std::uint32_t m32 = static_cast<std::uint32_t>(mask);
        const double loss = portfolio_loss(pf, m32);
        if (loss < v) continue;
        tail.add(law[mask]);
        total_tail_loss.add(law[mask] * loss);
        for (std::size_t g = 0; g < n_gr; ++g)
            s1[g].add(law[mask] * group_loss(pf, groups, g, m32));
    }
    report.tail_prob = tail.value();
    if (!(report.tail_prob > 0.0))
        throw std::invalid_argument("enumerate_exact: threshold has zero tail probability");
    report.cvar = total_tail_loss.value() / report.tail_prob;
    report.cvar_contribs.resize(n_gr);
    for (std::size_t g = 0; g < n_gr; ++g)
        report.cvar_contribs[g] = s1[g].value() / report.tail_prob;
    return report;
}

}  // namespace qrc
