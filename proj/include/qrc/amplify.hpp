#pragma once

#include <vector>

#include "qrc/oracles.hpp"
#include "qrc/qsim.hpp"

namespace qrc {

// Phase program for fixed-point amplitude amplification. `length` is the
// total number of base-oracle applications (forward plus inverse, odd by
// construction); `phases` holds the l = (length-1)/2 angles
//   alpha_j = 2 * cot^-1( tan(2 pi j / L) * sqrt(1 - gamma^2) ),
// with 1/gamma = cosh(arccosh(1/delta) / L). One amplification round j
// applies the flag phase e^{i alpha_{l+1-j}}, the inverse oracle, the
// zero-label phase e^{i alpha_j}, and the oracle again. The formula is not
// trusted on its own: construction re-verifies the success floor
// numerically over a sweep of overlaps and refuses schedules that miss it.
struct FPAASchedule {
    int length = 1;
    std::vector<double> phases;
    double delta = 0.0;  // amplitude-error target
    double width = 0.0;  // guaranteed for all overlap p >= width
    double floor = 0.0;  // 1 - delta^2
};

// Minimal odd length satisfying arccosh(1/delta) <= L * arccosh(1/sqrt(1-w))
// (asymptotically log(2/delta)/sqrt(w)). Throws guard_error when the length
// would exceed `max_length`.
FPAASchedule compute_phase_schedule(double delta, double width, int max_length = 100001);

// Flag-1 probability the schedule achieves on an initial overlap p, computed
// by running the phase sequence on the two-branch reduction. This is the
// exact success law of the full register-level pipeline, which never leaves
// the two-dimensional span of its tail and garbage branches.
double fpaa_success_probability(const FPAASchedule& schedule, double p);

// Textbook amplitude amplification with fixed pi phases and m rounds
// (2m+1 oracle uses): sin^2((2m+1) asin(sqrt p)). The over-rotation control.
double grover_success_probability(int rounds, double p);

// Residual-mass budget: the amplified state may leave at most
// cap = min(eps / (2 c_max), (sigma_max / e_max)^2) of probability outside
// the flag, which keeps both the mean shift and the variance inflation of
// the payload estimates inside their halves of the error budget.
class EpsPrimeBudget {
  public:
    EpsPrimeBudget(double eps, double c_max, double sigma_max, double e_max);

    double cap() const { return cap_; }
    double eps() const { return eps_; }
    double c_max() const { return c_max_; }
    double sigma_max() const { return sigma_max_; }
    double e_max() const { return e_max_; }

  private:
    double eps_, c_max_, sigma_max_, e_max_, cap_;
};

// The amplified tail oracle: prepares (almost) the tail-conditional state,
// with flag-0 mass strictly below the budget cap. Scheduling uses the known
// overlap lower bound; the realized residual at the build-time overlap is
// checked in closed loop and the schedule lengthened past ripple peaks if
// needed.
class AmplifiedOracle {
  public:
    static AmplifiedOracle build(TailOracle oracle, double p_lower, const EpsPrimeBudget& budget,
                                 int max_length = 100001);

    const TailOracle& base() const { return oracle_; }
    const FPAASchedule& schedule() const { return schedule_; }
    double cap() const { return cap_; }
    // Residual flag-0 mass predicted at the base oracle's own tail mass.
    double predicted_residual() const { return predicted_residual_; }

    // |0...0> -> amplified state. Charges `schedule().length` base-oracle
    // applications to the ledger.
    void apply(StateVector& state, QueryLedger& ledger) const;

  private:
    AmplifiedOracle(TailOracle oracle, FPAASchedule schedule, double cap, double residual)
        : oracle_(std::move(oracle)), schedule_(std::move(schedule)), cap_(cap),
          predicted_residual_(residual) {}

    TailOracle oracle_;
    FPAASchedule schedule_;
    double cap_;
    double predicted_residual_;
};

}  // namespace qrc
