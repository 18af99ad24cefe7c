#include "core/clt.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/format.hpp"
#include "core/quadrature.hpp"
#include "core/stats.hpp"

namespace stochham {

void GroupSpecD::validate(int64_t n) const {
    if (m.empty()) throw SpecError("group spec: empty");
    if (A.size() != m.size() || Sigma.size() != m.size())
        throw SpecError("group spec: m, A, Sigma must have one entry per group");
    size_t d = dim();
    if (d == 0) throw SpecError("group spec: zero-dimensional drift");
    int64_t total = 0;
    for (size_t k = 0; k < m.size(); ++k) {
        if (m[k] < 0) throw SpecError("group spec: negative multiplicity");
        total += m[k];
        if (A[k].size() != d) throw SpecError("group spec: drift dimension mismatch");
        if (Sigma[k].n != static_cast<int>(d))
            throw SpecError("group spec: covariance dimension mismatch");
        if (!is_psd(Sigma[k], 1e-12))
            throw SpecError("group spec: Sigma[" + std::to_string(k) +
                            "] is not symmetric positive semidefinite");
    }
    if (total != n)
        throw SpecError("group spec: multiplicities sum to " + std::to_string(total) +
                        ", declared n is " + std::to_string(n));
}

std::complex<double> cf_product(const CfModel& model, const Vec& t) {
    model.groups.validate(model.n);
    size_t d = model.groups.dim();
    if (t.size() != d) throw SpecError("cf product: frequency dimension mismatch");
    double norm2 = 0.0;
    for (double v : t) norm2 += v * v;
    if (std::sqrt(norm2) > model.t_radius)
        throw DomainError("cf product: |t| = " + g17(std::sqrt(norm2)) +
                          " outside the declared neighborhood radius " + g17(model.t_radius));

    double re = 0.0, im = 0.0;
    for (size_t k = 0; k < model.groups.h(); ++k) {
        double mk = static_cast<double>(model.groups.m[k]);
        double drift = 0.0;
        for (size_t p = 0; p < d; ++p) drift += t[p] * model.groups.A[k][p];
        double quad = 0.0;
        for (size_t p = 0; p < d; ++p)
            for (size_t q = 0; q < d; ++q) quad += t[p] * model.groups.Sigma[k].at(p, q) * t[q];
        im += mk * drift;
        re -= 0.5 * mk * quad;
    }
    std::complex<double> lambda_part = std::exp(std::complex<double>(re, im));
    std::complex<double> c = model.c ? model.c(t) : std::complex<double>(1.0, 0.0);
    std::complex<double> d_n = model.d_n ? model.d_n(t) : std::complex<double>(0.0, 0.0);
    return c * lambda_part + d_n;
}

std::complex<double> gaussian_cf(const GaussianLimit& law, const Vec& t) {
    size_t d = law.dim();
    if (t.size() != d) throw SpecError("gaussian cf: frequency dimension mismatch");
    double drift = 0.0, quad = 0.0;
    for (size_t p = 0; p < d; ++p) {
        drift += t[p] * law.mean[p];
        for (size_t q = 0; q < d; ++q) quad += t[p] * law.cov.at(p, q) * t[q];
    }
    return std::exp(std::complex<double>(-0.5 * quad, drift));
}

GaussianLimit gaussian_limit_from_groups(const GroupSpecD& groups, int64_t n) {
    groups.validate(n);
    size_t d = groups.dim();
    GaussianLimit out;
    out.mean.assign(d, 0.0);
    out.cov = Mat(d);
    for (size_t k = 0; k < groups.h(); ++k) {
        double mk = static_cast<double>(groups.m[k]);
        for (size_t p = 0; p < d; ++p) {
            out.mean[p] += mk * groups.A[k][p];
            for (size_t q = 0; q < d; ++q)
                out.cov.at(p, q) += mk * groups.Sigma[k].at(p, q) / static_cast<double>(n);
        }
    }
    return out;
}

FamilyDiagnostic gaussian_limit_family(const std::vector<GroupSpecD>& groups,
                                       const std::vector<int64_t>& n, double tol) {
    if (groups.empty() || groups.size() != n.size())
        throw SpecError("group family: need matching, non-empty groups and n sequences");
    std::vector<GaussianLimit> limits;
    limits.reserve(groups.size());
    for (size_t j = 0; j < groups.size(); ++j)
        limits.push_back(gaussian_limit_from_groups(groups[j], n[j]));

    FamilyDiagnostic diag;
    diag.limit = limits.back();
    size_t w = std::max<size_t>(2, groups.size() / 10);
    w = std::min(w, limits.size());
    for (size_t i = limits.size() - w; i < limits.size(); ++i)
        for (size_t j = i + 1; j < limits.size(); ++j)
            diag.cauchy_gap = std::max(diag.cauchy_gap, max_abs_gap(limits[i].cov, limits[j].cov));
    diag.converged = diag.cauchy_gap <= tol;
    return diag;
}

GaussianLimit continuous_limit_from_density(const std::function<double(double)>& m,
                                            const std::function<Vec(double)>& A,
                                            const std::function<Mat(double)>& Sigma, double h,
                                            double T, double quad_tol) {
    if (!(h > 1.0)) throw SpecError("continuous limit: h must exceed 1");
    if (!(T > 0.0)) throw SpecError("continuous limit: T must be positive");
    double mass = adaptive_simpson(m, 1.0, h, quad_tol);
    if (std::abs(mass - T) > 1e-8 * std::max(1.0, std::abs(T)))
        throw SpecError("continuous limit: integral of m is " + g17(mass) +
                        ", declared T is " + g17(T));
    size_t d = A(1.0).size();
    GaussianLimit out;
    out.mean.resize(d);
    out.cov = Mat(d);
    for (size_t p = 0; p < d; ++p) {
        out.mean[p] = adaptive_simpson([&](double s) { return m(s) * A(s)[p]; }, 1.0, h, quad_tol);
        for (size_t q = p; q < d; ++q) {
            double v = adaptive_simpson([&](double s) { return m(s) * Sigma(s).at(p, q); }, 1.0,
                                        h, quad_tol) /
                       T;
            out.cov.at(p, q) = v;
            out.cov.at(q, p) = v;
        }
    }
    return out;
}

SubsequenceResult extract_convergent_subsequence(const std::vector<Mat>& x, double tol,
                                                 double eta_sq) {
    if (x.empty()) throw SpecError("subsequence extraction: empty sequence");
    if (!(tol > 0.0)) throw SpecError("subsequence extraction: tol must be positive");
    size_t d = x.front().n;
    for (const Mat& v : x)
        if (v.n != static_cast<int>(d))
            throw SpecError("subsequence extraction: inconsistent dimensions");

    size_t w = std::max<size_t>(10, x.size() / 10);
    w = std::min(w, x.size());
    std::vector<size_t> window(w);
    for (size_t i = 0; i < w; ++i) window[i] = x.size() - w + i;
    std::sort(window.begin(), window.end(),
              [&](size_t a, size_t b) { return mat_trace(x[a]) < mat_trace(x[b]); });

    // tol-linkage clustering against each cluster's first representative.
    std::vector<std::vector<size_t>> clusters;
    for (size_t idx : window) {
        bool placed = false;
        for (auto& cl : clusters) {
            if (max_abs_gap(x[cl.front()], x[idx]) <= tol) {
                cl.push_back(idx);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({idx});
    }
    // Representatives are in ascending trace order, so the first cluster is
    // the smallest accumulation value.
    const std::vector<size_t>& chosen = clusters.front();

    SubsequenceResult res;
    res.limit = Mat(d);
    for (size_t idx : chosen)
        res.limit = mat_add(res.limit, mat_scale(x[idx], 1.0 / static_cast<double>(chosen.size())));
    for (size_t p = 0; p < d; ++p)
        for (size_t q = 0; q < d; ++q)
            if (std::abs(res.limit.at(p, q)) > eta_sq + tol)
                throw SpecError("subsequence extraction: limit exceeds the declared bound " +
                                g17(eta_sq));
    for (size_t i = 0; i < x.size(); ++i)
        if (max_abs_gap(x[i], res.limit) <= tol) res.indices.push_back(i);
    return res;
}

void statistic_terms(const ActionAnglePath& path, double delta, int64_t n,
                     std::vector<double>& out) {
    if (!(delta > 0.0)) throw SpecError("statistic: delta must be positive");
    if (n < 1) throw SpecError("statistic: n must be at least 1");
    const TimeGrid& g = path.grid;
    double ratio = delta / g.dt;
    int64_t stride = static_cast<int64_t>(std::llround(ratio));
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9)
        throw SpecError("statistic alignment: delta " + g17(delta) +
                        " is not a multiple of the grid spacing " + g17(g.dt) +
                        " (offending index k=1)");
    size_t d = path.dim;
    out.assign(static_cast<size_t>(n) * d, 0.0);
    for (int64_t k = 1; k <= n; ++k) {
        int64_t idx = k * stride;
        double target = static_cast<double>(k) * delta;
        if (idx > g.steps)
            throw SpecError("statistic alignment: path ends before time " + g17(target) +
                            " (offending index k=" + std::to_string(k) + ")");
        if (std::abs(g.time(idx) - target) > 1e-9 * std::max(1.0, target))
            throw SpecError("statistic alignment: grid point " + g17(g.time(idx)) +
                            " does not match k*delta = " + g17(target) +
                            " (offending index k=" + std::to_string(k) + ")");
        for (size_t p = 0; p < d; ++p)
            out[static_cast<size_t>(k - 1) * d + p] = path.angle(idx, p) / target;
    }
}

StatisticAccumulator::StatisticAccumulator(size_t dim, int64_t n, double delta, int64_t slots)
    : dim_(dim), n_(n), delta_(delta) {
    if (slots < 1) throw SpecError("statistic accumulator: need at least one slot");
    raw_.assign(static_cast<size_t>(slots) * dim, 0.0);
    autocorr_.assign(static_cast<size_t>(slots) * dim, 0.0);
    state_.assign(static_cast<size_t>(slots), 0);
}

void StatisticAccumulator::add_path(int64_t slot, const ActionAnglePath& path) {
    if (slot < 0 || static_cast<size_t>(slot) >= state_.size())
        throw SpecError("statistic accumulator: slot out of range");
    if (path.dim != dim_) throw SpecError("statistic accumulator: path dimension mismatch");
    std::vector<double> z;
    statistic_terms(path, delta_, n_, z);
    std::vector<double> series(static_cast<size_t>(n_));
    for (size_t p = 0; p < dim_; ++p) {
        double sum = 0.0;
        for (int64_t k = 0; k < n_; ++k) {
            series[static_cast<size_t>(k)] = z[static_cast<size_t>(k) * dim_ + p];
            sum += series[static_cast<size_t>(k)];
        }
        raw_[static_cast<size_t>(slot) * dim_ + p] = sum;
        autocorr_[static_cast<size_t>(slot) * dim_ + p] = lag1_autocorrelation(series);
    }
    state_[static_cast<size_t>(slot)] = 1;
}

void StatisticAccumulator::mark_discarded(int64_t slot) {
    if (slot < 0 || static_cast<size_t>(slot) >= state_.size())
        throw SpecError("statistic accumulator: slot out of range");
    state_[static_cast<size_t>(slot)] = 2;
    ++discarded_;
}

CltStatistic StatisticAccumulator::finalize() const {
    CltStatistic s;
    s.n = n_;
    s.delta = delta_;
    s.dim = dim_;
    int64_t filled = 0;
    for (char st : state_) {
        if (st == 0) throw SpecError("statistic accumulator: unfilled replica slot");
        if (st == 1) ++filled;
    }
    if (filled < 2) throw SpecError("statistic accumulator: fewer than 2 surviving replicas");
    s.replicas = filled;
    s.raw_sum.reserve(static_cast<size_t>(filled) * dim_);
    s.autocorr_lag1.assign(dim_, 0.0);
    for (size_t slot = 0; slot < state_.size(); ++slot) {
        if (state_[slot] != 1) continue;
        for (size_t p = 0; p < dim_; ++p) {
            s.raw_sum.push_back(raw_[slot * dim_ + p]);
            s.autocorr_lag1[p] += autocorr_[slot * dim_ + p];
        }
    }
    double R = static_cast<double>(filled);
    for (size_t p = 0; p < dim_; ++p) s.autocorr_lag1[p] /= R;

    s.centering.assign(dim_, 0.0);
    for (int64_t r = 0; r < filled; ++r)
        for (size_t p = 0; p < dim_; ++p)
            s.centering[p] += s.raw_sum[static_cast<size_t>(r) * dim_ + p];
    for (size_t p = 0; p < dim_; ++p) s.centering[p] /= R;

    s.centering_se.assign(dim_, 0.0);
    for (int64_t r = 0; r < filled; ++r)
        for (size_t p = 0; p < dim_; ++p) {
            double dev = s.raw_sum[static_cast<size_t>(r) * dim_ + p] - s.centering[p];
            s.centering_se[p] += dev * dev;
        }
    for (size_t p = 0; p < dim_; ++p)
        s.centering_se[p] = std::sqrt(s.centering_se[p] / (R - 1.0) / R);

    double scale = 1.0 / std::sqrt(static_cast<double>(n_) * delta_);
    s.normalized.resize(s.raw_sum.size());
    for (int64_t r = 0; r < filled; ++r)
        for (size_t p = 0; p < dim_; ++p) {
            size_t idx = static_cast<size_t>(r) * dim_ + p;
            s.normalized[idx] = (s.raw_sum[idx] - s.centering[p]) * scale;
        }
    return s;
}

CltStatistic assemble_statistic(const std::vector<ActionAnglePath>& paths, double delta,
                                int64_t n) {
    if (paths.empty()) throw SpecError("statistic: no paths");
    StatisticAccumulator acc(paths.front().dim, n, delta, static_cast<int64_t>(paths.size()));
    for (size_t r = 0; r < paths.size(); ++r)
        acc.add_path(static_cast<int64_t>(r), paths[r]);
    return acc.finalize();
}

GaussianLimit predicted_limit(const System& sys, const SimSpec& cfg, const Vec& w_bar) {
    size_t d = sys.dim();
    if (w_bar.size() != d) throw SpecError("predicted limit: w_bar dimension mismatch");
    GaussianLimit out;
    out.mean.assign(d, 0.0);
    out.cov = outer(w_bar, w_bar);
    if (!cfg.angle_noise.is_levy) return out;

    const LevyTriplet& trip = cfg.angle_noise.triplet;
    if (trip.gamma.size() != d)
        throw SpecError("predicted limit: angle triplet drift dimension mismatch");
    double eta_sq = cfg.zeta * cfg.zeta;
    Mat upper = out.cov;
    if (d == 1) {
        upper.at(0, 0) += 2.0 * eta_sq * trip.gamma[0] * trip.gamma[0];
    } else {
        for (size_t p = 0; p < d; ++p)
            for (size_t q = 0; q < d; ++q) {
                double gsum = trip.gamma[p] + trip.gamma[q];
                upper.at(p, q) += eta_sq * gsum * gsum + 2.0 * w_bar[p] * w_bar[q];
            }
    }
    out.cov_lower = out.cov;
    out.cov_upper = upper;
    return out;
}

} // namespace stochham
