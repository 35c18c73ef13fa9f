#include "qrc/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "qrc/numerics.hpp"

namespace qrc {

int comparator_ge(double x, double y, const FixedPointFormat& format) {
    return format.compare_ge(x, y);
}

TailOracle::TailOracle(ScenarioBasis basis, FixedPointFormat format)
    : basis_(basis), format_(format) {}

TailOracle TailOracle::build(const TailOracleSpec& spec) {
    validate(spec.portfolio);
    const std::size_t n = spec.portfolio.size();
    ScenarioBasis basis(spec.grid.size(), n);
    TailOracle oracle(basis, spec.format);
    oracle.injector_ = GridInjector(spec.grid);

    const FixedPointFormat& fmt = spec.format;

    // Angle tables through the fixed-point arithmetic chain. Each rounded
    // step mirrors one reversible-arithmetic output register.
    oracle.thetas_.assign(n, std::vector<double>(spec.grid.size()));
    for (std::size_t k = 0; k < n; ++k) {
        const Obligor& ob = spec.portfolio.obligors[k];
        const double a = fmt.round(ob.loading);
        const double z = fmt.round(ob.threshold);
        const double denom = fmt.round(std::sqrt(1.0 - ob.loading * ob.loading));
        for (std::size_t i = 0; i < spec.grid.size(); ++i) {
            const double x = fmt.round(spec.grid.points[i]);
            const double arg = fmt.round(fmt.round(z - fmt.round(a * x)) / denom);
            const double p = fmt.round(std_normal_cdf(arg));
            const double q = std::min(1.0, std::max(0.0, 1.0 - p));
            oracle.thetas_[k][i] = fmt.round(std::acos(std::sqrt(q)));
        }
    }

    // Comparator bit per default pattern: running fixed-point loss sum,
    // then the sign-bit comparison against the rounded threshold.
    const std::size_t n_patterns = std::size_t{1} << n;
    oracle.marked_.resize(n_patterns);
    const double v = fmt.round(spec.threshold);
    for (std::size_t mask = 0; mask < n_patterns; ++mask) {
        double running = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask & (std::size_t{1} << k))
                running = fmt.round(running + fmt.round(spec.portfolio.obligors[k].exposure));
        }
        oracle.marked_[mask] = static_cast<std::uint8_t>(fmt.compare_ge(running, v));
    }

    // Flag permutation: w ^= marked[y]. An involution, exact at grid
    // resolution, charged at one multiply-add per obligor plus the compare.
    const auto& marked = oracle.marked_;
    oracle.flag_perm_ = LabelPermutation::from_function(
        basis,
        [&basis, &marked](std::size_t label) {
            return marked[basis.defaults(label)] ? label ^ std::size_t{1} : label;
        },
        2 * n + 1);

    // Mass the model law puts on the marked set; an unusable threshold is a
    // configuration error, not something to discover mid-run.
    KahanSum p;
    for (std::size_t i = 0; i < spec.grid.size(); ++i)
        for (std::size_t mask = 0; mask < n_patterns; ++mask)
            if (oracle.marked_[mask])
                p.add(scenario_probability(spec.portfolio, spec.grid, i,
                                           static_cast<std::uint32_t>(mask)));
    oracle.tail_prob_ = p.value();
    if (!(oracle.tail_prob_ > 0.0))
        throw std::invalid_argument("TailOracle: threshold marks a zero-probability tail");
    return oracle;
}

bool TailOracle::marks(std::size_t cell, std::uint32_t defaults) const {
    (void)cell;  // the comparator only sees the default pattern
    return marked_[defaults] != 0;
}

void TailOracle::apply(StateVector& state, QueryLedger& ledger) const {
    if (!(state.basis == basis_)) throw std::invalid_argument("TailOracle: basis mismatch");
    injector_.apply(state, ledger);
    for (std::size_t k = 0; k < basis_.n_obligors(); ++k) {
        ledger.arithmetic_calls += 2;  // CDF chain + arccos-sqrt
        apply_cry(state, k, thetas_[k], false, ledger);
    }
    flag_perm_.apply(state, ledger);
    ledger.ugev_calls += 1;
}

void TailOracle::apply_inverse(StateVector& state, QueryLedger& ledger) const {
    if (!(state.basis == basis_)) throw std::invalid_argument("TailOracle: basis mismatch");
    flag_perm_.apply_inverse(state, ledger);
    for (std::size_t k = basis_.n_obligors(); k-- > 0;) {
        ledger.arithmetic_calls += 2;
        apply_cry(state, k, thetas_[k], true, ledger);
    }
    injector_.apply(state, ledger);  // real reflection: self-inverse
    ledger.ugev_calls += 1;
}

GroupPayload GroupPayload::build(const Portfolio& pf, const GroupPartition& groups,
                                 const FixedPointFormat& format) {
    validate(pf);
    if (groups.n_obligors() != pf.size())
        throw std::invalid_argument("GroupPayload: partition does not match pool size");
    GroupPayload pl;
    pl.n_groups_ = groups.n_groups();
    pl.n_obligors_ = pf.size();
    const std::size_t n_patterns = std::size_t{1} << pf.size();
    pl.table_.resize(n_patterns * pl.n_groups_);
    for (std::size_t mask = 0; mask < n_patterns; ++mask) {
        for (std::size_t g = 0; g < pl.n_groups_; ++g) {
            double running = 0.0;
            for (std::size_t k = groups.begin(g); k < groups.end(g); ++k) {
                if (mask & (std::size_t{1} << k))
                    running = format.round(running + format.round(pf.obligors[k].exposure));
            }
            pl.table_[mask * pl.n_groups_ + g] = running;
        }
    }
    pl.exposures_.resize(pl.n_groups_);
    for (std::size_t g = 0; g < pl.n_groups_; ++g)
        pl.exposures_[g] = pl.table_[(n_patterns - 1) * pl.n_groups_ + g];
    return pl;
}

double GroupPayload::value_for_pattern(std::uint32_t defaults, std::size_t group) const {
    return table_[static_cast<std::size_t>(defaults) * n_groups_ + group];
}

double GroupPayload::value(const ScenarioBasis& basis, std::size_t label,
                           std::size_t group) const {
    if (basis.flag(label) == 0) return 0.0;
    return value_for_pattern(basis.defaults(label), group);
}

double AnnotatedState::expectation(std::size_t group) const {
    KahanSum s;
    const auto& basis = state->basis;
    for (std::size_t w = 1; w < state->amp.size(); w += 2) {
        const double pr = std::norm(state->amp[w]);
        if (pr > 0.0) s.add(pr * payload->value_for_pattern(basis.defaults(w), group));
    }
    return s.value();
}

double AnnotatedState::second_moment(std::size_t group) const {
    KahanSum s;
    const auto& basis = state->basis;
    for (std::size_t w = 1; w < state->amp.size(); w += 2) {
        const double pr = std::norm(state->amp[w]);
        if (pr > 0.0) {
            const double xi = payload->value_for_pattern(basis.defaults(w), group);
            s.add(pr * xi * xi);
        }
    }
    return s.value();
}

double AnnotatedState::flag0_mass() const {
    KahanSum s;
    for (std::size_t w = 0; w < state->amp.size(); w += 2) s.add(std::norm(state->amp[w]));
    return s.value();
}

AnnotatedState apply_u_xi(const StateVector& state, const GroupPayload& payload,
                          QueryLedger& ledger) {
    if (state.basis.n_obligors() != payload.n_obligors())
        throw std::invalid_argument("apply_u_xi: payload does not match basis");
    ledger.uxi_calls += 1;
    ledger.arithmetic_calls += 2 * payload.n_obligors();
    return AnnotatedState{&state, &payload};
}

}  // namespace qrc
