#include "qrc/qsim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qrc/numerics.hpp"

namespace qrc {

FixedPointFormat::FixedPointFormat(int total_bits, int fraction_bits)
    : total_bits_(total_bits), fraction_bits_(fraction_bits) {
    if (total_bits < 2 || total_bits > 62)
        throw std::invalid_argument("FixedPointFormat: total_bits must be in [2, 62]");
    if (fraction_bits < 0 || fraction_bits >= total_bits)
        throw std::invalid_argument("FixedPointFormat: fraction_bits must be in [0, total_bits)");
    scale_ = std::ldexp(1.0, fraction_bits);
    scale_inv_ = std::ldexp(1.0, -fraction_bits);
}

double FixedPointFormat::max_value() const {
    return from_raw((std::int64_t{1} << (total_bits_ - 1)) - 1);
}

double FixedPointFormat::min_value() const {
    return from_raw(-(std::int64_t{1} << (total_bits_ - 1)));
}

std::int64_t FixedPointFormat::to_raw(double x) const {
    if (!std::isfinite(x)) throw guard_error("fixed point: non-finite value");
    const double scaled = x * scale_;
    const double r = std::round(scaled);  // ties away from zero
    const double lo = -std::ldexp(1.0, total_bits_ - 1);
    const double hi = std::ldexp(1.0, total_bits_ - 1) - 1.0;
    if (r < lo || r > hi)
        throw guard_error("fixed point: value " + std::to_string(x) + " outside " +
                          std::to_string(total_bits_) + "." + std::to_string(fraction_bits_) +
                          " range; widen the format");
    return static_cast<std::int64_t>(r);
}

double FixedPointFormat::from_raw(std::int64_t r) const {
    return static_cast<double>(r) * scale_inv_;
}

double FixedPointFormat::round(double x) const { return from_raw(to_raw(x)); }

int FixedPointFormat::compare_ge(double x, double y) const {
    // Sign bit of the subtraction register: with both operands in range the
    // difference fits in 63 bits, so plain int64 arithmetic is the honest
    // two's-complement model.
    const std::int64_t diff = to_raw(x) - to_raw(y);
    return diff >= 0 ? 1 : 0;
}

ScenarioBasis::ScenarioBasis(std::size_t n_grid, std::size_t n_obligors)
    : n_grid_(n_grid), n_obligors_(n_obligors) {
    if (n_grid < 2) throw std::invalid_argument("ScenarioBasis: need >= 2 grid points");
    if (n_obligors == 0 || n_obligors > 24)
        throw std::invalid_argument("ScenarioBasis: obligor count out of range");
    dim_ = n_grid << (n_obligors + 1);
    constexpr std::size_t kGuard = std::size_t{1} << 24;
    if ((dim_ >> (n_obligors + 1)) != n_grid || dim_ > kGuard)
        throw guard_error("ScenarioBasis: dimension " + std::to_string(n_grid) + "*2^" +
                          std::to_string(n_obligors + 1) + " exceeds the 2^24 amplitude guard");
}

StateVector StateVector::zero_state(const ScenarioBasis& basis) {
    StateVector sv{basis, std::vector<std::complex<double>>(basis.dimension())};
    sv.amp[0] = 1.0;
    return sv;
}

double StateVector::norm_sq() const {
    KahanSum s;
    for (const auto& a : amp) s.add(std::norm(a));
    return s.value();
}

bool StateVector::is_zero_state(double tol) const {
    return std::abs(amp[0] - std::complex<double>(1.0, 0.0)) <= tol &&
           std::abs(norm_sq() - 1.0) <= tol;
}

QueryLedger& QueryLedger::operator+=(const QueryLedger& o) {
    usn_calls += o.usn_calls;
    arithmetic_calls += o.arithmetic_calls;
    cry_calls += o.cry_calls;
    ugev_calls += o.ugev_calls;
    uxi_calls += o.uxi_calls;
    classical_samples += o.classical_samples;
    return *this;
}

QueryLedger QueryLedger::scaled(std::uint64_t factor) const {
    QueryLedger l;
    l.usn_calls = usn_calls * factor;
    l.arithmetic_calls = arithmetic_calls * factor;
    l.cry_calls = cry_calls * factor;
    l.ugev_calls = ugev_calls * factor;
    l.uxi_calls = uxi_calls * factor;
    l.classical_samples = classical_samples * factor;
    return l;
}

GridInjector::GridInjector(const DiscreteSN& grid) {
    const std::size_t n = grid.size();
    sqrt_probs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.probs[i] < 0.0)
            throw std::invalid_argument("GridInjector: negative cell probability");
        sqrt_probs_[i] = std::sqrt(grid.probs[i]);
    }
    // Householder vector u = e_0 - s; H = I - 2 u u^T / |u|^2 swaps e_0 and s.
    u_ = sqrt_probs_;
    for (auto& x : u_) x = -x;
    u_[0] += 1.0;
    double nsq = 0.0;
    for (double x : u_) nsq += x * x;
    // Degenerate case s == e_0: the identity will do.
    inv_half_norm_sq_ = nsq > 1e-300 ? 2.0 / nsq : 0.0;
}

void GridInjector::apply(StateVector& state, QueryLedger& ledger) const {
    const std::size_t n = state.basis.n_grid();
    if (n != u_.size()) throw std::invalid_argument("GridInjector: grid size mismatch");
    ledger.usn_calls += 1;
    if (inv_half_norm_sq_ == 0.0) return;
    const std::size_t stride = std::size_t{1} << (state.basis.n_obligors() + 1);
    for (std::size_t block = 0; block < stride; ++block) {
        std::complex<double> dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += u_[i] * state.amp[i * stride + block];
        dot *= inv_half_norm_sq_;
        for (std::size_t i = 0; i < n; ++i) state.amp[i * stride + block] -= dot * u_[i];
    }
}

void inject_prepared_state(StateVector& state, const DiscreteSN& grid, QueryLedger& ledger) {
    if (!state.is_zero_state())
        throw std::invalid_argument("inject_prepared_state: state must be |0...0>");
    GridInjector(grid).apply(state, ledger);
}

void apply_cry(StateVector& state, std::size_t k, const std::vector<double>& theta_by_cell,
               bool inverse, QueryLedger& ledger) {
    const auto& basis = state.basis;
    if (k >= basis.n_obligors()) throw std::invalid_argument("apply_cry: bad obligor index");
    if (theta_by_cell.size() != basis.n_grid())
        throw std::invalid_argument("apply_cry: need one angle per grid cell");
    ledger.cry_calls += 1;
    const std::size_t bit = std::size_t{1} << (k + 1);  // +1 for the flag bit
    for (std::size_t cell = 0; cell < basis.n_grid(); ++cell) {
        const double theta = inverse ? -theta_by_cell[cell] : theta_by_cell[cell];
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const std::size_t base = cell << (basis.n_obligors() + 1);
        for (std::size_t rest = 0; rest < (std::size_t{1} << (basis.n_obligors() + 1)); ++rest) {
            if (rest & bit) continue;
            const std::size_t i0 = base | rest;
            const std::size_t i1 = i0 | bit;
            const std::complex<double> a0 = state.amp[i0];
            const std::complex<double> a1 = state.amp[i1];
            state.amp[i0] = c * a0 + s * a1;
            state.amp[i1] = -s * a0 + c * a1;
        }
    }
}

void LabelPermutation::validate_bijection() const {
    std::vector<bool> seen(map_.size(), false);
    for (std::size_t w = 0; w < map_.size(); ++w) {
        const std::uint32_t t = map_[w];
        if (t >= map_.size() || seen[t])
            throw std::invalid_argument("LabelPermutation: mapping is not a bijection");
        seen[t] = true;
    }
}

void LabelPermutation::apply(StateVector& state, QueryLedger& ledger) const {
    if (state.amp.size() != map_.size())
        throw std::invalid_argument("LabelPermutation: dimension mismatch");
    ledger.arithmetic_calls += cost_;
    std::vector<std::complex<double>> out(state.amp.size());
    for (std::size_t w = 0; w < map_.size(); ++w) out[map_[w]] = state.amp[w];
    state.amp.swap(out);
}

void LabelPermutation::apply_inverse(StateVector& state, QueryLedger& ledger) const {
    if (state.amp.size() != map_.size())
        throw std::invalid_argument("LabelPermutation: dimension mismatch");
    ledger.arithmetic_calls += cost_;
    std::vector<std::complex<double>> out(state.amp.size());
    for (std::size_t w = 0; w < map_.size(); ++w) out[w] = state.amp[map_[w]];
    state.amp.swap(out);
}

double marked_probability(const StateVector& state) {
    KahanSum s;
    for (std::size_t w = 1; w < state.amp.size(); w += 2) s.add(std::norm(state.amp[w]));
    return s.value();
}

std::vector<double> conditional_distribution(const StateVector& state) {
    const double p = marked_probability(state);
    if (!(p > 0.0)) throw stat_error("conditional_distribution: flag has zero mass");
    std::vector<double> law(state.amp.size() / 2);
    for (std::size_t s = 0; s < law.size(); ++s) law[s] = std::norm(state.amp[2 * s + 1]) / p;
    return law;
}

void apply_phase_on_flag(StateVector& state, int flag_value, double phi) {
    const std::complex<double> ph = std::polar(1.0, phi);
    for (std::size_t w = static_cast<std::size_t>(flag_value & 1); w < state.amp.size(); w += 2)
        state.amp[w] *= ph;
}

void apply_phase_on_label(StateVector& state, std::size_t label, double phi) {
    if (label >= state.amp.size()) throw std::invalid_argument("apply_phase_on_label: bad label");
    state.amp[label] *= std::polar(1.0, phi);
}

}  // namespace qrc
