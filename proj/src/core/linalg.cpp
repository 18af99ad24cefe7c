#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace stochham {

Mat mat_identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Mat mat_add(const Mat& x, const Mat& y) {
    if (x.n != y.n) throw SpecError("matrix dimension mismatch in mat_add");
    Mat out(x.n);
    for (size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] + y.a[i];
    return out;
}

Mat mat_scale(const Mat& x, double s) {
    Mat out = x;
    for (double& v : out.a) v *= s;
    return out;
}

Mat outer(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw SpecError("vector dimension mismatch in outer");
    Mat out(static_cast<int>(u.size()));
    for (int i = 0; i < out.n; ++i)
        for (int j = 0; j < out.n; ++j) out.at(i, j) = u[i] * v[j];
    return out;
}

double mat_trace(const Mat& x) {
    double t = 0.0;
    for (int i = 0; i < x.n; ++i) t += x.at(i, i);
    return t;
}

double max_abs_gap(const Mat& x, const Mat& y) {
    if (x.n != y.n) throw SpecError("matrix dimension mismatch in max_abs_gap");
    double g = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) g = std::max(g, std::abs(x.a[i] - y.a[i]));
    return g;
}

Vec jacobi_eigenvalues(const Mat& sym, Mat* eigenvectors) {
    int n = sym.n;
    if (n == 0) throw SpecError("empty matrix in jacobi_eigenvalues");
    Mat a = sym;
    Mat v = mat_identity(n);
    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
        if (off < 1e-300) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a.at(p, q);
                if (apq == 0.0) continue;
                double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a.at(k, p);
                    double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a.at(p, k);
                    double aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v.at(k, p);
                    double vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::pair<double, int>> order(n);
    for (int i = 0; i < n; ++i) order[i] = {a.at(i, i), i};
    std::sort(order.begin(), order.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    Vec evals(n);
    for (int i = 0; i < n; ++i) evals[i] = order[i].first;
    if (eigenvectors) {
        *eigenvectors = Mat(n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) eigenvectors->at(i, j) = v.at(i, order[j].second);
    }
    return evals;
}

bool is_psd(const Mat& sym, double tol) {
    Vec ev = jacobi_eigenvalues(sym);
    return ev.empty() ? true : ev.back() >= -tol;
}

} // namespace stochham
