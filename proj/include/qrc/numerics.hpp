#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace qrc {

// Neumaier-compensated accumulator. Enumeration sums can run over millions of
// terms spanning many orders of magnitude; plain += loses digits we later
// assert on at 1e-9.
class KahanSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Welford mean/variance with O(1) merge, so block-wise reductions give the
// same moments regardless of partitioning.
class MomentAccumulator {
  public:
    void add(double x) {
        ++count_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(count_);
        m2_ += d * (x - mean_);
    }

    void merge(const MomentAccumulator& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count_);
        const double nb = static_cast<double>(other.count_);
        const double d = other.mean_ - mean_;
        mean_ += d * nb / (na + nb);
        m2_ += other.m2_ + d * d * na * nb / (na + nb);
        count_ += other.count_;
    }

    std::size_t count() const { return count_; }
    double mean() const {
        if (count_ == 0) throw std::logic_error("MomentAccumulator: empty");
        return mean_;
    }
    // Population variance (divide by n).
    double variance() const {
        if (count_ == 0) throw std::logic_error("MomentAccumulator: empty");
        return m2_ / static_cast<double>(count_);
    }
    // Standard error of the mean (sample variance / n, then sqrt).
    double std_error() const {
        if (count_ < 2) throw std::logic_error("MomentAccumulator: need >= 2 samples");
        const double n = static_cast<double>(count_);
        return std::sqrt(m2_ / (n - 1.0) / n);
    }

  private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Error taxonomy used for process exit codes: invalid_argument -> 2,
// guard_error -> 3, stat_error -> 4.
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct stat_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qrc
