// Tail-flag oracle and payload tests. The centerpiece is an independent
// explicit-ancilla reference simulator: it materializes the angle and loss
// scratch registers the production simulator elides, runs the literal
// compute-use-uncompute circuit, and must reproduce the production state
// amplitude for amplitude.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "doctest.h"

#include "qrc/model.hpp"
#include "qrc/numerics.hpp"
#include "qrc/oracles.hpp"
#include "qrc/qsim.hpp"

using namespace qrc;

namespace {

Portfolio golden_portfolio() {
    Portfolio pf;
    pf.obligors = {{3.0, inverse_std_normal_cdf(0.1), 0.5},
                   {5.0, inverse_std_normal_cdf(0.2), 0.5},
                   {7.0, inverse_std_normal_cdf(0.3), 0.5}};
    return pf;
}

TailOracleSpec golden_spec(const FixedPointFormat& fmt) {
    TailOracleSpec spec;
    spec.portfolio = golden_portfolio();
    spec.grid = discretize_std_normal(16, 4.0);
    spec.threshold = 7.0;
    spec.format = fmt;
    return spec;
}

constexpr double kGoldenTailProb = 0.3157357969822585;
constexpr double kGoldenContrib1 = 0.5922870475817211;
constexpr double kGoldenContrib2 = 8.275855536524592;
constexpr double kGoldenSigma1 = 1.19417636721386;
constexpr double kGoldenSigma2 = 2.3292314500499796;

}  // namespace

TEST_CASE("fixed-point comparator") {
    const FixedPointFormat fmt(16, 8);
    CHECK(comparator_ge(7.0, 7.0, fmt) == 1);
    CHECK(comparator_ge(7.0 + fmt.resolution(), 7.0, fmt) == 1);
    CHECK(comparator_ge(7.0 - fmt.resolution(), 7.0, fmt) == 0);
    CHECK(comparator_ge(-1.0, 0.0, fmt) == 0);
    CHECK(comparator_ge(0.0, -1.0, fmt) == 1);
}

TEST_CASE("oracle output carries the model law onto the labels") {
    const Portfolio pf = golden_portfolio();

    // Fine format: register rounding is far below the check tolerance.
    const TailOracle fine = TailOracle::build(golden_spec(FixedPointFormat(56, 46)));
    StateVector st = StateVector::zero_state(fine.basis());
    QueryLedger ledger;
    fine.apply(st, ledger);
    CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

    const auto& basis = fine.basis();
    for (std::size_t i = 0; i < 16; ++i)
        for (std::uint32_t y = 0; y < 8; ++y) {
            const double want = scenario_probability(pf, golden_spec(fine.format()).grid, i, y);
            const int w = fine.marks(i, y) ? 1 : 0;
            CHECK(std::abs(std::norm(st.amp[basis.index(i, y, w)]) - want) <= 1e-10);
            CHECK(std::norm(st.amp[basis.index(i, y, 1 - w)]) <= 1e-20);
        }

    CHECK(std::abs(marked_probability(st) - fine.tail_prob()) <= 1e-11);
    CHECK(std::abs(fine.tail_prob() - kGoldenTailProb) <= 1e-12);

    // Production format: the same comparison within the coarser tolerance.
    const TailOracle coarse = TailOracle::build(golden_spec(FixedPointFormat(32, 24)));
    StateVector st2 = StateVector::zero_state(coarse.basis());
    coarse.apply(st2, ledger);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::uint32_t y = 0; y < 8; ++y) {
            const double want = scenario_probability(pf, golden_spec(coarse.format()).grid, i, y);
            const int w = coarse.marks(i, y) ? 1 : 0;
            CHECK(std::abs(std::norm(st2.amp[basis.index(i, y, w)]) - want) <= 1e-6);
        }
    CHECK(std::abs(marked_probability(st2) - coarse.tail_prob()) <= 1e-6);
}

TEST_CASE("oracle application is reversible and charges the documented costs") {
    const TailOracle oracle = TailOracle::build(golden_spec(FixedPointFormat(32, 24)));
    StateVector st = StateVector::zero_state(oracle.basis());
    QueryLedger ledger;

    oracle.apply(st, ledger);
    CHECK(ledger.usn_calls == 1);
    CHECK(ledger.cry_calls == 3);
    CHECK(ledger.arithmetic_calls == 13);  // 4n + 1 at n = 3
    CHECK(ledger.ugev_calls == 1);
    CHECK(ledger.uxi_calls == 0);

    oracle.apply_inverse(st, ledger);
    CHECK(st.is_zero_state(1e-12));
    CHECK(ledger.usn_calls == 2);
    CHECK(ledger.cry_calls == 6);
    CHECK(ledger.arithmetic_calls == 26);
    CHECK(ledger.ugev_calls == 2);

    StateVector wrong = StateVector::zero_state(ScenarioBasis(8, 3));
    CHECK_THROWS_AS(oracle.apply(wrong, ledger), std::invalid_argument);
}

TEST_CASE("comparator marking depends only on the default pattern") {
    const TailOracle oracle = TailOracle::build(golden_spec(FixedPointFormat(32, 24)));
    const Portfolio pf = golden_portfolio();
    for (std::uint32_t y = 0; y < 8; ++y) {
        const bool want = portfolio_loss(pf, y) >= 7.0;
        for (std::size_t i = 0; i < 16; ++i) CHECK(oracle.marks(i, y) == want);
    }
}

TEST_CASE("angle tables reproduce the conditional default probabilities") {
    const Portfolio pf = golden_portfolio();
    const DiscreteSN grid = discretize_std_normal(16, 4.0);

    const TailOracle fine = TailOracle::build(golden_spec(FixedPointFormat(56, 46)));
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& th = fine.angles(k);
        REQUIRE(th.size() == 16);
        for (std::size_t i = 0; i < 16; ++i) {
            const double p = conditional_default_prob(pf.obligors[k], grid.points[i]);
            const double want = std::acos(std::sqrt(1.0 - p));
            CHECK(std::abs(th[i] - want) <= 1e-9);
            // The rotation loads exactly the conditional probability.
            CHECK(std::sin(th[i]) * std::sin(th[i]) ==
                  doctest::Approx(p).epsilon(1e-9));
        }
        // Positive loading: defaults get rarer as the systemic factor rises.
        for (std::size_t i = 1; i < 16; ++i) CHECK(th[i] < th[i - 1]);
    }

    const TailOracle coarse = TailOracle::build(golden_spec(FixedPointFormat(32, 24)));
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 16; ++i) {
            const double p = conditional_default_prob(pf.obligors[k], grid.points[i]);
            CHECK(std::abs(coarse.angles(k)[i] - std::acos(std::sqrt(1.0 - p))) <= 1e-4);
        }
}

TEST_CASE("unreachable thresholds are rejected at build time") {
    TailOracleSpec spec = golden_spec(FixedPointFormat(32, 24));
    spec.threshold = 15.5;  // above the maximal loss: empty tail
    CHECK_THROWS_AS((void)TailOracle::build(spec), std::invalid_argument);
}

TEST_CASE("group payload compiles fixed-point group losses") {
    const Portfolio pf = golden_portfolio();
    const GroupPartition gp = GroupPartition::from_sizes({1, 2}, 3);
    const FixedPointFormat fmt(32, 24);
    const GroupPayload pl = GroupPayload::build(pf, gp, fmt);

    CHECK(pl.n_groups() == 2);
    CHECK(pl.n_obligors() == 3);
    CHECK(pl.group_exposure(0) == 3.0);
    CHECK(pl.group_exposure(1) == 12.0);

    for (std::uint32_t y = 0; y < 8; ++y) {
        const double g0 = (y & 1u) ? 3.0 : 0.0;
        const double g1 = ((y & 2u) ? 5.0 : 0.0) + ((y & 4u) ? 7.0 : 0.0);
        CHECK(pl.value_for_pattern(y, 0) == g0);
        CHECK(pl.value_for_pattern(y, 1) == g1);
    }

    // Flag-0 labels pay nothing regardless of the pattern.
    const ScenarioBasis basis(16, 3);
    CHECK(pl.value(basis, basis.index(2, 7u, 0), 1) == 0.0);
    CHECK(pl.value(basis, basis.index(2, 7u, 1), 1) == 12.0);

    CHECK_THROWS_AS((void)GroupPayload::build(pf, GroupPartition::from_sizes({1, 1}, 2), fmt),
                    std::invalid_argument);
}

TEST_CASE("payload moments against the enumerated tail") {
    const TailOracle oracle = TailOracle::build(golden_spec(FixedPointFormat(56, 46)));
    const GroupPayload payload = GroupPayload::build(
        golden_portfolio(), GroupPartition::from_sizes({1, 2}, 3), oracle.format());

    StateVector st = StateVector::zero_state(oracle.basis());
    QueryLedger ledger;
    oracle.apply(st, ledger);
    const QueryLedger before = ledger;
    const AnnotatedState view = apply_u_xi(st, payload, ledger);
    CHECK(ledger.uxi_calls == before.uxi_calls + 1);
    CHECK(ledger.arithmetic_calls == before.arithmetic_calls + 6);  // 2n multiply-adds

    // E[xi_K] = Pr(tail) * tail-conditional mean; the payout is zero off
    // the flagged labels.
    const double p = kGoldenTailProb;
    CHECK(std::abs(view.expectation(0) - p * kGoldenContrib1) <= 1e-10);
    CHECK(std::abs(view.expectation(1) - p * kGoldenContrib2) <= 1e-10);
    CHECK(std::abs(view.flag0_mass() - (1.0 - p)) <= 1e-11);

    // E[xi_K^2] = Pr(tail) * (tail variance + tail mean^2).
    const double m2_0 = p * (kGoldenSigma1 * kGoldenSigma1 + kGoldenContrib1 * kGoldenContrib1);
    const double m2_1 = p * (kGoldenSigma2 * kGoldenSigma2 + kGoldenContrib2 * kGoldenContrib2);
    CHECK(std::abs(view.second_moment(0) - m2_0) <= 1e-9);
    CHECK(std::abs(view.second_moment(1) - m2_1) <= 1e-9);

    const GroupPayload mismatched =
        GroupPayload::build(golden_portfolio(), GroupPartition::single(3), oracle.format());
    StateVector small = StateVector::zero_state(ScenarioBasis(4, 2));
    CHECK_THROWS_AS((void)apply_u_xi(small, mismatched, ledger), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Explicit-ancilla reference simulator.
//
// The production simulator never represents the angle and loss registers;
// every derived value is recomputed from (cell, defaults) on demand. This
// reference does the opposite: it carries both scratch registers in the
// basis label, runs the literal circuit
//
//   inject -> [write angle_k | rotate y_k | erase angle_k]  for each k
//          -> [add losses | flag ^= compare | subtract losses]
//
// with two's-complement register arithmetic, asserts that both registers
// return to zero on every branch, and compares the surviving state against
// the production oracle label by label.
// ---------------------------------------------------------------------------

namespace {

struct RefKey {
    std::size_t cell;
    std::uint32_t defaults;
    int flag;
    std::uint32_t angle_raw;  // 12-bit register
    std::uint32_t loss_raw;   // 12-bit register

    bool operator<(const RefKey& o) const {
        return std::tie(cell, defaults, flag, angle_raw, loss_raw) <
               std::tie(o.cell, o.defaults, o.flag, o.angle_raw, o.loss_raw);
    }
};

using RefState = std::map<RefKey, double>;

constexpr std::uint32_t kRegMask = 0xFFFu;  // 12-bit registers

int signed12(std::uint32_t r) {
    return (r & 0x800u) ? static_cast<int>(r) - 4096 : static_cast<int>(r);
}

// Rebuild the state through a label permutation.
template <typename Fn>
RefState permute(const RefState& st, Fn&& fn) {
    RefState out;
    for (const auto& [key, amp] : st) out[fn(key)] += amp;
    return out;
}

}  // namespace

TEST_CASE("explicit-ancilla circuit reproduces the production oracle") {
    Portfolio pf;
    pf.obligors = {{3.5, inverse_std_normal_cdf(0.2), 0.5},
                   {2.25, inverse_std_normal_cdf(0.25), 0.35}};
    const DiscreteSN grid = discretize_std_normal(4, 2.5);
    const FixedPointFormat fmt(12, 7);

    TailOracleSpec spec;
    spec.portfolio = pf;
    spec.grid = grid;
    spec.threshold = 4.0;
    spec.format = fmt;
    const TailOracle oracle = TailOracle::build(spec);

    // Production run.
    StateVector prod = StateVector::zero_state(oracle.basis());
    QueryLedger ledger;
    oracle.apply(prod, ledger);

    // Reference run. Injection on the zero state writes sqrt(p_i).
    RefState ref;
    for (std::size_t i = 0; i < grid.size(); ++i)
        ref[RefKey{i, 0u, 0, 0u, 0u}] = std::sqrt(grid.probs[i]);

    for (std::size_t k = 0; k < 2; ++k) {
        // Angle register values, straight from the compiled table.
        std::vector<std::uint32_t> raw(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            raw[i] = static_cast<std::uint32_t>(fmt.to_raw(oracle.angles(k)[i])) & kRegMask;
            CHECK(raw[i] != 0u);  // the write is visible in the register
        }

        // Compute: angle ^= table[cell] (register starts at zero).
        ref = permute(ref, [&](RefKey key) {
            key.angle_raw ^= raw[key.cell];
            return key;
        });

        // Use: rotate the default bit by the register contents.
        const std::uint32_t bit = 1u << k;
        RefState rotated;
        std::set<RefKey> bases;
        for (const auto& [key, amp] : ref) {
            (void)amp;
            RefKey base = key;
            base.defaults &= ~bit;
            bases.insert(base);
        }
        for (const RefKey& base : bases) {
            RefKey upper = base;
            upper.defaults |= bit;
            const double a0 = ref.count(base) ? ref.at(base) : 0.0;
            const double a1 = ref.count(upper) ? ref.at(upper) : 0.0;
            const double theta = fmt.from_raw(signed12(base.angle_raw));
            const double c = std::cos(theta), s = std::sin(theta);
            const double n0 = c * a0 + s * a1;
            const double n1 = -s * a0 + c * a1;
            if (n0 != 0.0) rotated[base] = n0;
            if (n1 != 0.0) rotated[upper] = n1;
        }
        ref = std::move(rotated);

        // Uncompute: the same XOR erases the register.
        ref = permute(ref, [&](RefKey key) {
            key.angle_raw ^= raw[key.cell];
            return key;
        });
        for (const auto& [key, amp] : ref) {
            (void)amp;
            CHECK(key.angle_raw == 0u);
        }
    }

    // Loss accumulation: modular adds of the rounded exposures.
    const std::uint32_t raw_e0 = static_cast<std::uint32_t>(fmt.to_raw(3.5)) & kRegMask;
    const std::uint32_t raw_e1 = static_cast<std::uint32_t>(fmt.to_raw(2.25)) & kRegMask;
    const std::uint32_t raw_v = static_cast<std::uint32_t>(fmt.to_raw(4.0)) & kRegMask;
    const auto add_loss = [&](RefKey key, std::uint32_t raw_e, std::uint32_t bit) {
        if (key.defaults & bit) key.loss_raw = (key.loss_raw + raw_e) & kRegMask;
        return key;
    };
    ref = permute(ref, [&](RefKey k) { return add_loss(k, raw_e0, 1u); });
    ref = permute(ref, [&](RefKey k) { return add_loss(k, raw_e1, 2u); });

    // Flag ^= [loss >= v], decided by the sign of the register difference.
    ref = permute(ref, [&](RefKey key) {
        if (signed12(key.loss_raw) - signed12(raw_v) >= 0) key.flag ^= 1;
        return key;
    });

    // Subtract the losses back out and check the register is clean.
    const auto sub_loss = [&](RefKey key, std::uint32_t raw_e, std::uint32_t bit) {
        if (key.defaults & bit) key.loss_raw = (key.loss_raw - raw_e) & kRegMask;
        return key;
    };
    ref = permute(ref, [&](RefKey k) { return sub_loss(k, raw_e1, 2u); });
    ref = permute(ref, [&](RefKey k) { return sub_loss(k, raw_e0, 1u); });
    for (const auto& [key, amp] : ref) {
        (void)amp;
        CHECK(key.loss_raw == 0u);
        CHECK(key.angle_raw == 0u);
    }

    // Label-by-label equivalence with the production state.
    const ScenarioBasis& basis = oracle.basis();
    double total = 0.0;
    for (std::size_t label = 0; label < basis.dimension(); ++label) {
        const RefKey key{basis.cell(label), basis.defaults(label), basis.flag(label), 0u, 0u};
        const double want = ref.count(key) ? ref.at(key) : 0.0;
        CHECK(std::abs(prod.amp[label].real() - want) <= 1e-14);
        CHECK(std::abs(prod.amp[label].imag()) <= 1e-15);
        total += want * want;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
