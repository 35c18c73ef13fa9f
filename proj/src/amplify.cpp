#include "qrc/amplify.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "qrc/numerics.hpp"

namespace qrc {

namespace {

FPAASchedule schedule_with_length(double delta, double width, int length) {
    FPAASchedule sch;
    sch.length = length;
    sch.delta = delta;
    sch.width = width;
    sch.floor = 1.0 - delta * delta;
    const int l = (length - 1) / 2;
    if (l == 0) return sch;
    const double gamma_inv = std::cosh(std::acosh(1.0 / delta) / static_cast<double>(length));
    const double g = std::sqrt(std::max(0.0, 1.0 - 1.0 / (gamma_inv * gamma_inv)));
    sch.phases.resize(l);
    for (int j = 1; j <= l; ++j) {
        // 2*cot^-1 on the (0, pi) branch.
        const double t = std::tan(2.0 * M_PI * j / static_cast<double>(length));
        sch.phases[j - 1] = 2.0 * std::atan2(1.0, t * g);
    }
    return sch;
}

void validate_floor(const FPAASchedule& sch) {
    constexpr int kSweep = 64;
    for (int i = 0; i <= kSweep; ++i) {
        const double p = sch.width + (1.0 - sch.width) * static_cast<double>(i) / kSweep;
        if (fpaa_success_probability(sch, p) < sch.floor - 1e-9)
            throw std::logic_error("phase schedule misses its floor at p = " + std::to_string(p));
    }
}

}  // namespace

double fpaa_success_probability(const FPAASchedule& schedule, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("fpaa_success_probability: p outside [0,1]");
    const int l = (schedule.length - 1) / 2;
    const std::complex<double> s0(std::sqrt(p), 0.0);
    const std::complex<double> s1(std::sqrt(1.0 - p), 0.0);
    std::complex<double> a0 = s0, a1 = s1;
    for (int j = 0; j < l; ++j) {
        a0 *= std::polar(1.0, schedule.phases[l - 1 - j]);
        // Reflection about the prepared state: psi -= (1 - e^{i alpha_j}) s <s|psi>.
        const std::complex<double> f =
            (1.0 - std::polar(1.0, schedule.phases[j])) * (std::conj(s0) * a0 + std::conj(s1) * a1);
        a0 -= f * s0;
        a1 -= f * s1;
    }
    return std::norm(a0);
}

double grover_success_probability(int rounds, double p) {
    if (rounds < 0) throw std::invalid_argument("grover_success_probability: negative rounds");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("grover_success_probability: p outside [0,1]");
    const double theta = std::asin(std::sqrt(p));
    const double s = std::sin(static_cast<double>(2 * rounds + 1) * theta);
    return s * s;
}

FPAASchedule compute_phase_schedule(double delta, double width, int max_length) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("compute_phase_schedule: delta must be in (0,1)");
    if (!(width > 0.0 && width <= 1.0))
        throw std::invalid_argument("compute_phase_schedule: width must be in (0,1]");

    int length = 1;
    if (width < 1.0) {
        const double need = std::acosh(1.0 / delta) / std::acosh(1.0 / std::sqrt(1.0 - width));
        length = static_cast<int>(std::ceil(need));
        if (length < 1) length = 1;
        if (length % 2 == 0) length += 1;
    }
    if (length > max_length)
        throw guard_error("compute_phase_schedule: required length " + std::to_string(length) +
                          " exceeds cap " + std::to_string(max_length) +
                          " (residual budget too tight for this overlap)");

    FPAASchedule sch = schedule_with_length(delta, width, length);
    // The schedule is only as good as what it demonstrably achieves: sweep
    // the guaranteed overlap range and insist on the floor.
    validate_floor(sch);
    return sch;
}

EpsPrimeBudget::EpsPrimeBudget(double eps, double c_max, double sigma_max, double e_max)
    : eps_(eps), c_max_(c_max), sigma_max_(sigma_max), e_max_(e_max) {
    if (!(eps > 0.0) || !(c_max > 0.0) || !(sigma_max > 0.0) || !(e_max > 0.0))
        throw std::invalid_argument("EpsPrimeBudget: parameters must be positive");
    if (sigma_max > e_max)
        throw std::invalid_argument("EpsPrimeBudget: sigma_max cannot exceed e_max "
                                    "(the payload is bounded by e_max)");
    const double r = sigma_max / e_max;
    cap_ = std::min(eps / (2.0 * c_max), r * r);
    if (cap_ >= 1.0)
        throw std::invalid_argument("EpsPrimeBudget: cap >= 1; residual budget is vacuous");
}

AmplifiedOracle AmplifiedOracle::build(TailOracle oracle, double p_lower,
                                       const EpsPrimeBudget& budget, int max_length) {
    if (!(p_lower > 0.0 && p_lower <= 1.0))
        throw std::invalid_argument("AmplifiedOracle: overlap lower bound must be in (0,1]");
    const double cap = budget.cap();
    const double delta = std::sqrt(cap);

    FPAASchedule sch = compute_phase_schedule(delta, p_lower, max_length);
    // Demand a strictly sub-cap residual at the oracle's actual tail mass;
    // ripple peaks of the success polynomial can touch the floor exactly, in
    // which case two more rounds clear it.
    const double p_actual = oracle.tail_prob();
    double residual = 1.0 - fpaa_success_probability(sch, std::max(p_actual, p_lower));
    for (int bump = 0; bump < 8 && residual >= cap; ++bump) {
        const int longer = sch.length + 2;
        if (longer > max_length)
            throw guard_error("AmplifiedOracle: cannot clear the residual cap within the "
                              "length limit");
        sch = schedule_with_length(delta, p_lower, longer);
        validate_floor(sch);
        residual = 1.0 - fpaa_success_probability(sch, std::max(p_actual, p_lower));
    }
    if (residual >= cap)
        throw std::logic_error("AmplifiedOracle: residual stuck at the cap");
    return AmplifiedOracle(std::move(oracle), std::move(sch), cap, residual);
}

void AmplifiedOracle::apply(StateVector& state, QueryLedger& ledger) const {
    if (!state.is_zero_state())
        throw std::invalid_argument("AmplifiedOracle: state must be |0...0>");
    oracle_.apply(state, ledger);
    const int l = (schedule_.length - 1) / 2;
    for (int j = 0; j < l; ++j) {
        apply_phase_on_flag(state, 1, schedule_.phases[l - 1 - j]);
        oracle_.apply_inverse(state, ledger);
        apply_phase_on_label(state, 0, schedule_.phases[j]);
        oracle_.apply(state, ledger);
    }
}

}  // namespace qrc
