#pragma once

// Shared helpers for the unit and acceptance suites: seeded random desk-scale
// instances and a threshold picker that lands the tail probability in a
// workable band.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "qrc/model.hpp"
#include "qrc/rng.hpp"

namespace testutil {

inline qrc::Portfolio random_portfolio(qrc::SplitMix64& rng, std::size_t n_obligors) {
    qrc::Portfolio pf;
    pf.obligors.reserve(n_obligors);
    for (std::size_t k = 0; k < n_obligors; ++k) {
        qrc::Obligor ob;
        ob.exposure = rng.uniform(0.5, 4.0);
        ob.loading = rng.uniform(0.2, 0.8);
        const double pd = rng.uniform(0.05, 0.4);
        ob.threshold = qrc::inverse_std_normal_cdf(pd);
        pf.obligors.push_back(ob);
    }
    return pf;
}

// Random contiguous partition of n obligors into 1..n groups.
inline qrc::GroupPartition random_partition(qrc::SplitMix64& rng, std::size_t n_obligors) {
    std::vector<std::size_t> sizes;
    std::size_t left = n_obligors;
    while (left > 0) {
        const std::size_t take =
            1 + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(left));
        const std::size_t sz = std::min(take, left);
        sizes.push_back(sz);
        left -= sz;
    }
    return qrc::GroupPartition::from_sizes(sizes, n_obligors);
}

// Loss threshold whose exact tail probability lies in [p_lo, p_hi]: scans the
// realized loss atoms from above. Throws when no atom lands in the band
// (callers redraw the instance).
inline double threshold_with_tail_in(const qrc::Portfolio& pf, const qrc::DiscreteSN& grid,
                                     double p_lo, double p_hi) {
    const std::vector<double> law = qrc::default_pattern_law(pf, grid);
    std::map<double, double> atoms;  // loss value -> total probability
    for (std::size_t mask = 0; mask < law.size(); ++mask)
        atoms[qrc::portfolio_loss(pf, static_cast<std::uint32_t>(mask))] += law[mask];
    double tail = 0.0;
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
        tail += it->second;
        if (tail >= p_lo && tail <= p_hi) return it->first;
        if (tail > p_hi) break;
    }
    throw std::runtime_error("no loss atom with tail probability in the requested band");
}

}  // namespace testutil
