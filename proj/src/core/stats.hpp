#pragma once
#include <complex>
#include <cstdint>
#include <vector>

#include "core/linalg.hpp"

namespace stochham {

// Replica outputs: row-major values (count x dim). Optional nonnegative
// weights summing to 1; empty means uniform.
struct SampleSet {
    size_t dim = 1;
    std::vector<double> values;
    std::vector<double> weights;

    size_t count() const { return dim == 0 ? 0 : values.size() / dim; }
    double at(size_t r, size_t p) const { return values[r * dim + p]; }
    void validate() const;
};

// Unbiased mean and covariance with standard errors. Mean standard error is
// the replica-spread formula se(mean_p) = sqrt(C_pp / R); covariance standard
// error is the asymptotic normal-theory formula
// se(C_pq) = sqrt((C_pp C_qq + C_pq^2) / (R - 1)).
// With weights, R is replaced by the effective sample size 1/sum(w_i^2) and
// the covariance uses the unbiased weighted normalization 1/(1 - sum w_i^2).
struct Moments {
    Vec mean, mean_se;
    Mat cov, cov_se;
    double effective_count = 0.0;
};
Moments sample_moments(const SampleSet& samples);

// (Weighted) empirical characteristic function: mean of exp(i <t, x>).
std::complex<double> empirical_cf(const SampleSet& samples, const Vec& t);

// One-sided Gaussian law for KS testing (variance 0 means a point mass).
// Kolmogorov-Smirnov distance of a 1-D sample set against N(mean, var):
// sup over the sorted samples of |empirical CDF - CDF|, evaluated on both
// sides of every jump. The Gaussian CDF uses std::erfc (absolute error well
// below 1e-12 over the real line).
double ks_vs_gaussian(std::vector<double> samples, double mean, double var);

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Standard normal CDF via erfc.
double normal_cdf(double x);

// Lag-1 autocorrelation of a scalar series (0 when degenerate).
double lag1_autocorrelation(const std::vector<double>& z);

} // namespace stochham
