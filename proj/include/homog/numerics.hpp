#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace homog {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Pairwise (cascade) summation; the result depends only on the order of `xs`.
double pairwise_sum(std::span<const double> xs);

struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased, n-1 denominator
    double stderr_mean = 0.0;
};

SampleStats sample_stats(std::span<const double> xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t points = 0;
};

// Least-squares fit of y = intercept + slope*x. Needs at least two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Fit of log(y) against log(x); all entries must be positive.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

std::vector<double> logspace(double lo, double hi, std::size_t n);

}  // namespace homog

namespace homog {

// mu = coefficient * variable^exponent, parsed from e.g. "250*R^-1.5", "L^-2", "0.3".
struct PowerLaw {
    double coefficient = 1.0;
    double exponent = 0.0;
    char variable = 'L';  // 'L' or 'R'; irrelevant when exponent == 0

    static PowerLaw parse(const std::string& text);
    double operator()(double x) const { return coefficient * std::pow(x, exponent); }
    std::string to_string() const;
};

// Runs body(i) for i in [0, n) on up to `threads` workers; jobs are claimed in
// index order. The first exception thrown by a job is rethrown after joining.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace homog
