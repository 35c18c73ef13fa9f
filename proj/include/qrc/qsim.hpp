#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qrc/model.hpp"

namespace qrc {

// Signed two's-complement fixed point with `total_bits` bits, of which
// `fraction_bits` sit behind the binary point. Every real intermediate the
// simulated arithmetic produces (rotation angles, running loss sums,
// payloads) is rounded onto this grid before use, so register width is an
// explicit model parameter rather than an afterthought.
class FixedPointFormat {
  public:
    FixedPointFormat(int total_bits, int fraction_bits);

    int total_bits() const { return total_bits_; }
    int fraction_bits() const { return fraction_bits_; }

    double resolution() const { return scale_inv_; }
    double max_value() const;
    double min_value() const;

    // Round to nearest representable value (ties away from zero). Values
    // outside the representable range trip guard_error with a hint to widen
    // the format.
    double round(double x) const;
    std::int64_t to_raw(double x) const;
    double from_raw(std::int64_t r) const;

    // 1 iff x >= y, decided on the fixed-point grid via the sign bit of the
    // two's-complement difference (both operands rounded first).
    int compare_ge(double x, double y) const;

  private:
    int total_bits_;
    int fraction_bits_;
    double scale_;
    double scale_inv_;
};

// Label layout for the reduced simulation basis: (grid cell i, default mask
// y, flag bit w) packed as ((i << n_obligors) | y) << 1 | w. Arithmetic
// ancillas are not represented: every derived register value is a function
// of (i, y) and is recomputed on demand, which is exactly the
// compute-use-uncompute discipline with the scratch registers elided.
class ScenarioBasis {
  public:
    ScenarioBasis(std::size_t n_grid, std::size_t n_obligors);

    std::size_t n_grid() const { return n_grid_; }
    std::size_t n_obligors() const { return n_obligors_; }
    std::size_t dimension() const { return dim_; }

    std::size_t index(std::size_t cell, std::uint32_t defaults, int flag) const {
        return (((cell << n_obligors_) | defaults) << 1) | static_cast<std::size_t>(flag);
    }
    std::size_t cell(std::size_t label) const { return label >> (n_obligors_ + 1); }
    std::uint32_t defaults(std::size_t label) const {
        return static_cast<std::uint32_t>((label >> 1) & ((std::size_t{1} << n_obligors_) - 1));
    }
    int flag(std::size_t label) const { return static_cast<int>(label & 1); }

    bool operator==(const ScenarioBasis& o) const {
        return n_grid_ == o.n_grid_ && n_obligors_ == o.n_obligors_;
    }

  private:
    std::size_t n_grid_;
    std::size_t n_obligors_;
    std::size_t dim_;
};

struct StateVector {
    ScenarioBasis basis;
    std::vector<std::complex<double>> amp;

    static StateVector zero_state(const ScenarioBasis& basis);

    double norm_sq() const;
    bool is_zero_state(double tol = 1e-12) const;
};

// Oracle-call accounting. Counters only ever increase; "arithmetic" counts
// simulated reversible-arithmetic invocations per the documented cost model
// (see oracles.hpp), not host FLOPs.
struct QueryLedger {
    std::uint64_t usn_calls = 0;         // grid-state preparations (and inverses)
    std::uint64_t arithmetic_calls = 0;  // reversible arithmetic ops
    std::uint64_t cry_calls = 0;         // controlled-Y rotation layers
    std::uint64_t ugev_calls = 0;        // tail-flag oracle applications
    std::uint64_t uxi_calls = 0;         // payload oracle applications
    std::uint64_t classical_samples = 0;

    QueryLedger& operator+=(const QueryLedger& o);
    QueryLedger scaled(std::uint64_t factor) const;
};

// Unitary injection of the discretized-normal amplitudes onto the grid
// register: the orthogonal reflection (Householder) that exchanges |0> with
// sum_i sqrt(p_i)|i>. Being a real reflection it is its own inverse, which
// is what the amplification rounds rely on.
class GridInjector {
  public:
    GridInjector() = default;  // empty; usable only after assignment
    explicit GridInjector(const DiscreteSN& grid);

    std::size_t n_grid() const { return u_.size(); }

    // Applies the reflection on the grid register of `state` (tensored with
    // identity elsewhere) and charges one usn_call.
    void apply(StateVector& state, QueryLedger& ledger) const;

  private:
    std::vector<double> u_;  // Householder vector e_0 - s
    double inv_half_norm_sq_ = 0.0;
    std::vector<double> sqrt_probs_;
};

// Convenience per the module interface: requires `state` to be |0...0> and
// leaves sqrt(p_i) on the (i, 0, 0) labels.
void inject_prepared_state(StateVector& state, const DiscreteSN& grid, QueryLedger& ledger);

// Controlled-Y rotation layer on default bit k, with the angle read from the
// grid register: R(theta) = [[cos, sin], [-sin, cos]] applied to the
// (y_k=0, y_k=1) amplitude pair for each grid cell. `theta_by_cell` must
// have one angle per grid point. Inverse = same layer with negated angles.
void apply_cry(StateVector& state, std::size_t k, const std::vector<double>& theta_by_cell,
               bool inverse, QueryLedger& ledger);

// Bijective relabeling of the computational basis, validated at
// construction. `arithmetic_cost` is charged per application.
class LabelPermutation {
  public:
    LabelPermutation() = default;  // empty; usable only after assignment

    template <typename Fn>
    static LabelPermutation from_function(const ScenarioBasis& basis, Fn&& fn,
                                          std::uint64_t arithmetic_cost);

    void apply(StateVector& state, QueryLedger& ledger) const;
    void apply_inverse(StateVector& state, QueryLedger& ledger) const;

    std::size_t image(std::size_t label) const { return map_[label]; }

  private:
    void validate_bijection() const;

    std::vector<std::uint32_t> map_;
    std::uint64_t cost_ = 0;
};

// Born-rule readout on the flag qubit.
double marked_probability(const StateVector& state);

// Conditional law over scenario labels (i, y) given flag = 1, renormalized.
// Indexed by (cell << n_obligors) | defaults.
std::vector<double> conditional_distribution(const StateVector& state);

// Diagonal phase e^{i phi} on all labels with the given flag value
// (amplification reflections are built out of these plus the zero-label
// phase below).
void apply_phase_on_flag(StateVector& state, int flag_value, double phi);
void apply_phase_on_label(StateVector& state, std::size_t label, double phi);

// --- template definition ---

template <typename Fn>
LabelPermutation LabelPermutation::from_function(const ScenarioBasis& basis, Fn&& fn,
                                                 std::uint64_t arithmetic_cost) {
    LabelPermutation perm;
    perm.cost_ = arithmetic_cost;
    perm.map_.resize(basis.dimension());
    for (std::size_t w = 0; w < basis.dimension(); ++w)
        perm.map_[w] = static_cast<std::uint32_t>(fn(w));
    perm.validate_bijection();
    return perm;
}

}  // namespace qrc
