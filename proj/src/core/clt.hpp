#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "core/linalg.hpp"
#include "core/sim.hpp"

namespace stochham {

// Grouped second-order model of a sum's characteristic function: h groups
// with multiplicities m_k, per-group drift vectors A_k and covariances
// Sigma_k, so that group k contributes exp{i<t,A_k> - t'Sigma_k t/2}^(m_k).
struct GroupSpecD {
    std::vector<int64_t> m;
    std::vector<Vec> A;
    std::vector<Mat> Sigma;

    size_t h() const { return m.size(); }
    size_t dim() const { return A.empty() ? 0 : A.front().size(); }
    void validate(int64_t n) const; // sum m == n, shapes consistent, Sigma symmetric PSD
};

// Characteristic-function product model: c(t) * prod_k lambda_k(t)^(m_k)
// + d_n(t). Null c means identically 1; null d_n means identically 0; d_sup
// is the declared sup-norm bound of d_n; t is restricted to |t| <= t_radius.
struct CfModel {
    GroupSpecD groups;
    int64_t n = 0;
    std::function<std::complex<double>(const Vec&)> c;
    std::function<std::complex<double>(const Vec&)> d_n;
    double d_sup = 0.0;
    double t_radius = std::numeric_limits<double>::infinity();
};

std::complex<double> cf_product(const CfModel& model, const Vec& t);

struct GaussianLimit {
    Vec mean;
    Mat cov;
    std::optional<Mat> cov_lower, cov_upper; // elementwise bounds, when known

    size_t dim() const { return mean.size(); }
};

// Gaussian characteristic function exp{i<t,mean> - t'cov t/2}.
std::complex<double> gaussian_cf(const GaussianLimit& law, const Vec& t);

// mean = sum m_k A_k, cov = sum m_k Sigma_k / n.
GaussianLimit gaussian_limit_from_groups(const GroupSpecD& groups, int64_t n);

// Limit of a family of group specs indexed by n, with a Cauchy-tail
// diagnostic: the largest elementwise covariance gap over the trailing
// window of the family (window = max(2, size/10)).
struct FamilyDiagnostic {
    GaussianLimit limit; // limit of the final member
    double cauchy_gap = 0.0;
    bool converged = false;
};
FamilyDiagnostic gaussian_limit_family(const std::vector<GroupSpecD>& groups,
                                       const std::vector<int64_t>& n, double tol);

// Continuum version: mean = integral of m_s A_s ds over [1, h], cov =
// integral of m_s Sigma_s ds / T; requires integral of m_s ds = T.
GaussianLimit continuous_limit_from_density(const std::function<double(double)>& m,
                                            const std::function<Vec(double)>& A,
                                            const std::function<Mat(double)>& Sigma, double h,
                                            double T, double quad_tol = 1e-10);

// Deterministic Bolzano-Weierstrass selection from a bounded matrix
// sequence. Rule: take the trailing window of width max(10, size/10),
// cluster its raw values by tol-linkage (elementwise distance to the
// cluster's first representative, representatives ordered by trace), pick
// the cluster with the smallest trace, and return its elementwise mean as
// the limit plus every sequence index within tol of that limit. The limit
// must satisfy |zeta2| <= eta_sq + tol elementwise (the declared bound).
struct SubsequenceResult {
    std::vector<size_t> indices;
    Mat limit;
};
SubsequenceResult extract_convergent_subsequence(const std::vector<Mat>& x, double tol,
                                                 double eta_sq);

// Per-replica statistic D_n = sum_{k=1}^n theta_{k delta}/(k delta), its
// cross-replica centering (the estimator of sum m_k A_k), and the normalized
// values (D_n - centering)/sqrt(n delta). Row-major (replicas x dim).
struct CltStatistic {
    int64_t n = 0;
    double delta = 0.0;
    size_t dim = 1;
    int64_t replicas = 0;
    std::vector<double> raw_sum;
    Vec centering, centering_se;
    std::vector<double> normalized;
    Vec autocorr_lag1; // mean within-path lag-1 autocorrelation of theta_{k delta}/(k delta)
};

// Streaming assembler: replicas land in preassigned slots so the result is
// independent of insertion order; discarded slots (domain aborts) are
// skipped and counted.
class StatisticAccumulator {
  public:
    StatisticAccumulator(size_t dim, int64_t n, double delta, int64_t slots);

    void add_path(int64_t slot, const ActionAnglePath& path);
    void mark_discarded(int64_t slot);
    int64_t discarded() const { return discarded_; }

    CltStatistic finalize() const;

  private:
    size_t dim_;
    int64_t n_;
    double delta_;
    std::vector<double> raw_;         // slots x dim
    std::vector<double> autocorr_;    // slots x dim
    std::vector<char> state_;         // 0 empty, 1 filled, 2 discarded
    int64_t discarded_ = 0;
};

// Extracts the per-k terms z_k = theta_{k delta}/(k delta) from a path,
// validating that every k delta lands on a grid point (throws a spec error
// naming the offending index otherwise). Output is row-major (n x dim).
void statistic_terms(const ActionAnglePath& path, double delta, int64_t n,
                     std::vector<double>& out);

CltStatistic assemble_statistic(const std::vector<ActionAnglePath>& paths, double delta,
                                int64_t n);

// Predicted limit law for the normalized statistic given the long-run mean
// frequency w_bar: Gaussian angle noise gives the rank-one covariance
// w_bar w_bar'; Levy angle noise gives elementwise bounds
// [w_bar_p w_bar_q, w_bar_p w_bar_q + eta^2 (gamma_2p + gamma_2q)^2
//  + 2 w_bar_p w_bar_q] (in 1-D: [w^2, w^2 + 2 zeta^2 gamma_2^2]).
GaussianLimit predicted_limit(const System& sys, const SimSpec& cfg, const Vec& w_bar);

} // namespace stochham
