#pragma once

#include <cstdint>
#include <vector>

#include "qrc/model.hpp"
#include "qrc/qsim.hpp"

namespace qrc {

// Everything needed to compile the tail-flag oracle.
struct TailOracleSpec {
    Portfolio portfolio;
    DiscreteSN grid;
    double threshold = 0.0;  // v
    FixedPointFormat format{32, 24};
};

// Free-function view of the fixed-point comparator: 1 iff x >= y at grid
// resolution (sign bit of the two's-complement difference).
int comparator_ge(double x, double y, const FixedPointFormat& format);

// The tail-flag oracle: |0...0> -> sum_i,y amp(i,y) |i, y, [L(y) >= v]>.
// Pipeline per application: one grid injection, one controlled-rotation
// layer per obligor (angle theta_k(i) = arccos(sqrt(1 - P_k(x_i))), computed
// through the fixed-point chain so the squared y_k=1 amplitude is the
// conditional default probability), then the comparator flag permutation.
//
// Cost model charged to the ledger per application (forward or inverse):
//   usn_calls        += 1
//   cry_calls        += n (one layer per obligor)
//   arithmetic_calls += 4n + 1
// The 4n+1 is: per obligor one composite CDF evaluation and one
// arccos-of-sqrt for the angle, one multiplication and one addition for the
// running loss, plus the final comparison. Angle/loss tables are compiled at
// build time; applications charge the reversible-arithmetic cost the
// compute-use-uncompute realization would pay.
class TailOracle {
  public:
    static TailOracle build(const TailOracleSpec& spec);

    const ScenarioBasis& basis() const { return basis_; }
    const FixedPointFormat& format() const { return format_; }
    std::size_t n_obligors() const { return basis_.n_obligors(); }

    // Model-law mass of the comparator-marked set (strictly positive,
    // validated at build).
    double tail_prob() const { return tail_prob_; }

    void apply(StateVector& state, QueryLedger& ledger) const;
    void apply_inverse(StateVector& state, QueryLedger& ledger) const;

    // Angle table for obligor k (one entry per grid cell), after fixed-point
    // rounding. Exposed for the explicit-ancilla cross-checks.
    const std::vector<double>& angles(std::size_t k) const { return thetas_[k]; }
    bool marks(std::size_t cell, std::uint32_t defaults) const;

  private:
    TailOracle(ScenarioBasis basis, FixedPointFormat format);

    ScenarioBasis basis_;
    FixedPointFormat format_;
    GridInjector injector_;
    std::vector<std::vector<double>> thetas_;  // [obligor][cell]
    std::vector<std::uint8_t> marked_;         // [defaults] -> comparator bit
    LabelPermutation flag_perm_;
    double tail_prob_ = 0.0;

    friend class TailOracleBuilder;
};

// Group payload: xi_K(i, y, w) = w * (fixed-point loss of group K under y).
// Values are compiled per default pattern; labels with flag 0 pay out 0, so
// expectations under the pre-measurement law pick up exactly the tail.
class GroupPayload {
  public:
    static GroupPayload build(const Portfolio& pf, const GroupPartition& groups,
                              const FixedPointFormat& format);

    std::size_t n_groups() const { return n_groups_; }
    std::size_t n_obligors() const { return n_obligors_; }

    double value(const ScenarioBasis& basis, std::size_t label, std::size_t group) const;
    double value_for_pattern(std::uint32_t defaults, std::size_t group) const;

    // E_K: the payload's own maximum (the fixed-point group exposure).
    double group_exposure(std::size_t group) const { return exposures_[group]; }

  private:
    std::size_t n_groups_ = 0;
    std::size_t n_obligors_ = 0;
    std::vector<double> table_;      // [defaults * n_groups + group]
    std::vector<double> exposures_;  // per group
};

// Logical application of the payload oracle: the state itself is unchanged
// (the payload register is a deterministic function of the label and stays
// elided); the ledger is charged one uxi_call plus the 2n multiply-add
// arithmetic, and the returned view serves moment queries against the
// pre-measurement law.
struct AnnotatedState {
    const StateVector* state = nullptr;
    const GroupPayload* payload = nullptr;

    double expectation(std::size_t group) const;     // E[xi_K] under |amp|^2
    double second_moment(std::size_t group) const;   // E[xi_K^2]
    double flag0_mass() const;
};

AnnotatedState apply_u_xi(const StateVector& state, const GroupPayload& payload,
                          QueryLedger& ledger);

}  // namespace qrc
