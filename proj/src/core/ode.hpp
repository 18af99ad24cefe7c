#pragma once
#include <functional>
#include <vector>

namespace stochham {

// Adaptive eighth-order Dormand-Prince integrator (DOP853) with seventh-order
// dense output, following Hairer-Norsett-Wanner. Supports uniform snapshot
// capture across an interval and event localization by sign change of a
// scalar functional, both via the dense-output interpolant.
class Dop853 {
  public:
    using Rhs = std::function<void(double t, const double* w, double* dwdt)>;

    Dop853(int n, Rhs rhs, double atol = 1e-12, double rtol = 1e-12);

    // Integrate state w from t0 to t1 in place.
    void integrate(double t0, double t1, std::vector<double>& w);

    // Integrate and store `snaps` uniformly spaced states (including both
    // endpoints) into out, each of size n; out is resized.
    void integrate_snapshots(double t0, double t1, std::vector<double>& w, int snaps,
                             std::vector<std::vector<double>>& out);

    // Integrate from t0 and return the time of the (skip+1)-th sign change of
    // event(w); a zero value at t0 itself is not counted as a change. The
    // crossing is localized by bisection on the dense output; w is advanced
    // to the crossing state. The internal step is capped at (t_max - t0)/64
    // so closely spaced crossings cannot be stepped over. Throws
    // NumericError if t_max is reached first.
    double integrate_to_event(double t0, double t_max, std::vector<double>& w,
                              const std::function<double(const double*)>& event, int skip = 0);

  private:
    // Core adaptive loop; on_accept(t_old, h, w_old, w_new) is invoked after
    // every accepted step and returns false to stop early. Returns true if
    // stopped early by the callback, false if t1 was reached.
    bool step_loop(double t0, double t1, std::vector<double>& w, double h_cap,
                   const std::function<bool(double, double, const std::vector<double>&,
                                            const std::vector<double>&)>& on_accept);

    void step12(const std::vector<double>& w, double t, double h, std::vector<double>& out);
    double error_norm(const std::vector<double>& w, const std::vector<double>& w_new) const;
    // Requires k4_ = f(t+h, w_new); builds the seventh-order interpolant for
    // the step [t, t+h].
    void prepare_dense(const std::vector<double>& w, const std::vector<double>& w_new, double t,
                       double h);
    void dense_eval(double theta, double* out) const;
    double initial_step(double t0, const std::vector<double>& w, double h_max,
                        double direction) const;

    int n_;
    Rhs rhs_;
    double atol_, rtol_;
    // Runge-Kutta stages and dense-output coefficient arrays.
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, k8_, k9_, k10_, ww_;
    std::vector<double> rc1_, rc2_, rc3_, rc4_, rc5_, rc6_, rc7_, rc8_;
};

} // namespace stochham
