#include "core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace stochham {

void SampleSet::validate() const {
    if (dim == 0) throw SpecError("sample set: dim must be positive");
    if (values.empty()) throw SpecError("sample set: empty");
    if (values.size() % dim != 0)
        throw SpecError("sample set: values length is not a multiple of dim");
    for (double v : values)
        if (!std::isfinite(v)) throw SpecError("sample set: non-finite value");
    if (!weights.empty()) {
        if (weights.size() != count())
            throw SpecError("sample set: weights length must equal the sample count");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw SpecError("sample set: weights must be nonnegative");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw SpecError("sample set: weights must sum to 1, got " + g17(total));
    }
}

Moments sample_moments(const SampleSet& samples) {
    samples.validate();
    size_t R = samples.count();
    size_t d = samples.dim;
    if (R < 2) throw SpecError("sample moments: need at least 2 samples for covariance");

    auto weight = [&](size_t r) {
        return samples.weights.empty() ? 1.0 / static_cast<double>(R) : samples.weights[r];
    };
    double w2 = 0.0;
    for (size_t r = 0; r < R; ++r) w2 += weight(r) * weight(r);
    double r_eff = 1.0 / w2;

    Moments m;
    m.effective_count = r_eff;
    m.mean.assign(d, 0.0);
    for (size_t r = 0; r < R; ++r)
        for (size_t p = 0; p < d; ++p) m.mean[p] += weight(r) * samples.at(r, p);

    m.cov = Mat(d);
    for (size_t r = 0; r < R; ++r) {
        double w = weight(r);
        for (size_t p = 0; p < d; ++p) {
            double dp = samples.at(r, p) - m.mean[p];
            for (size_t q = p; q < d; ++q)
                m.cov.at(p, q) += w * dp * (samples.at(r, q) - m.mean[q]);
        }
    }
    double norm = 1.0 - w2; // reduces to (R-1)/R for uniform weights
    if (!(norm > 0.0)) throw SpecError("sample moments: degenerate weights");
    for (size_t p = 0; p < d; ++p)
        for (size_t q = p; q < d; ++q) {
            m.cov.at(p, q) /= norm;
            m.cov.at(q, p) = m.cov.at(p, q);
        }

    m.mean_se.assign(d, 0.0);
    for (size_t p = 0; p < d; ++p) m.mean_se[p] = std::sqrt(m.cov.at(p, p) / r_eff);
    m.cov_se = Mat(d);
    for (size_t p = 0; p < d; ++p)
        for (size_t q = 0; q < d; ++q)
            m.cov_se.at(p, q) = std::sqrt(
                (m.cov.at(p, p) * m.cov.at(q, q) + m.cov.at(p, q) * m.cov.at(p, q)) /
                (r_eff - 1.0));
    return m;
}

std::complex<double> empirical_cf(const SampleSet& samples, const Vec& t) {
    samples.validate();
    if (t.size() != samples.dim)
        throw SpecError("empirical cf: frequency dimension mismatch");
    size_t R = samples.count();
    std::complex<double> acc(0.0, 0.0);
    for (size_t r = 0; r < R; ++r) {
        double phase = 0.0;
        for (size_t p = 0; p < samples.dim; ++p) phase += t[p] * samples.at(r, p);
        double w = samples.weights.empty() ? 1.0 / static_cast<double>(R) : samples.weights[r];
        acc += w * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return acc;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double ks_vs_gaussian(std::vector<double> samples, double mean, double var) {
    if (samples.empty()) throw SpecError("ks distance: empty sample");
    if (!(var >= 0.0)) throw SpecError("ks distance: negative variance");
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double sd = std::sqrt(var);
    if (sd == 0.0) {
        // Point-mass reference at the mean. Both CDFs may jump at the atom,
        // so the two-sided sweep below (which assumes a continuous reference)
        // would overstate the distance there; the sup is simply the empirical
        // mass strictly below the atom or the mass still missing at it.
        double below = static_cast<double>(
            std::lower_bound(samples.begin(), samples.end(), mean) - samples.begin());
        double at_or_below = static_cast<double>(
            std::upper_bound(samples.begin(), samples.end(), mean) - samples.begin());
        return std::max(below / n, 1.0 - at_or_below / n);
    }
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double cdf = normal_cdf((samples[i] - mean) / sd);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(cdf - lo), std::abs(hi - cdf)));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw SpecError("ks distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double lag1_autocorrelation(const std::vector<double>& z) {
    size_t n = z.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < n; ++k) {
        double d = z[k] - mean;
        den += d * d;
        if (k + 1 < n) num += d * (z[k + 1] - mean);
    }
    if (den == 0.0) return 0.0;
    return num / den;
}

} // namespace stochham
