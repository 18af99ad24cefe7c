#pragma once
#include <cstddef>
#include <vector>

namespace stochham {

using Vec = std::vector<double>;

// Small dense row-major matrix; everything in this artifact is d <= 4 or so,
// so simplicity beats cleverness.
struct Mat {
    int n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

Mat mat_identity(int n);
Mat mat_add(const Mat& x, const Mat& y);
Mat mat_scale(const Mat& x, double s);
Mat outer(const Vec& u, const Vec& v);
double mat_trace(const Mat& x);
double max_abs_gap(const Mat& x, const Mat& y);

// Eigenvalues (descending) of a symmetric matrix via the cyclic Jacobi
// method; optionally returns eigenvectors as columns.
Vec jacobi_eigenvalues(const Mat& sym, Mat* eigenvectors = nullptr);

// Positive semidefiniteness within an absolute eigenvalue tolerance.
bool is_psd(const Mat& sym, double tol);

} // namespace stochham
