#include "core/sim.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace stochham {

void NoiseModel::validate(size_t dim) const {
    if (is_levy) {
        triplet.validate();
        if (static_cast<size_t>(triplet.dim) != dim)
            throw SpecError("noise model: triplet dimension " + std::to_string(triplet.dim) +
                            " does not match system dimension " + std::to_string(dim));
    }
}

void SimSpec::validate(const System& sys) const {
    size_t d = sys.dim();
    if (I0.size() != d) throw SpecError("sim config: I0 dimension mismatch");
    if (theta0.size() != d) throw SpecError("sim config: theta0 dimension mismatch");
    if (!std::isfinite(sigma) || !std::isfinite(zeta))
        throw SpecError("sim config: noise intensities must be finite");
    for (double v : I0)
        if (!std::isfinite(v)) throw SpecError("sim config: I0 must be finite");
    for (double v : theta0)
        if (!std::isfinite(v)) throw SpecError("sim config: theta0 must be finite");
    grid.validate();
    action_noise.validate(d);
    angle_noise.validate(d);
    if (!sys.domain_ok(I0.data()))
        throw SpecError("sim config: I0 outside the frequency map's domain");
}

namespace {

NoisePath sample_noise(const NoiseModel& model, const TimeGrid& grid, size_t dim,
                       const StreamCtx& ctx, bool drop_large) {
    if (model.is_levy) return sample_levy(model.triplet, grid, ctx, drop_large);
    return sample_brownian(grid, static_cast<int>(dim), ctx);
}

// Evaluates omega at row `I`, repairing domain exits per policy. `work` is a
// scratch row of the same dimension.
void eval_omega(const System& sys, const SimSpec& spec, const double* I, double t, double* work,
                double* out, int64_t& repaired) {
    if (sys.domain_ok(I)) {
        sys.omega(I, out);
        return;
    }
    size_t d = sys.dim();
    for (size_t p = 0; p < d; ++p)
        if (!std::isfinite(I[p]))
            throw DomainError("simulate: non-finite action at t=" + g17(t));
    if (spec.policy == DomainPolicy::abort_replica)
        throw DomainError("simulate: action left the frequency-map domain at t=" + g17(t));
    for (size_t p = 0; p < d; ++p) {
        double v = I[p];
        if (spec.policy == DomainPolicy::reflect) v = std::abs(v);
        work[p] = std::max(v, kDomainEpsilon);
    }
    if (!sys.domain_ok(work))
        throw DomainError("simulate: domain repair failed at t=" + g17(t));
    ++repaired;
    sys.omega(work, out);
}

} // namespace

ActionAnglePath simulate(const System& sys, const SimSpec& spec, uint64_t master,
                         uint32_t replica) {
    spec.validate(sys);
    size_t d = sys.dim();
    int64_t pts = spec.grid.points();

    StreamCtx action_ctx{master, replica, Role::action};
    StreamCtx angle_ctx{master, replica, Role::angle};
    // Interlacing truncates the *angle* jumps only ("jumps of theta that
    // exceed a size of 1"); the action keeps its large jumps.
    NoisePath l1 = sample_noise(spec.action_noise, spec.grid, d, action_ctx, false);
    NoisePath l2 = sample_noise(spec.angle_noise, spec.grid, d, angle_ctx, spec.interlace);

    ActionAnglePath path;
    path.grid = spec.grid;
    path.dim = d;
    path.I.resize(static_cast<size_t>(pts) * d);
    path.theta.resize(static_cast<size_t>(pts) * d);
    path.freq_integral.resize(static_cast<size_t>(pts) * d);

    for (int64_t k = 0; k < pts; ++k)
        for (size_t p = 0; p < d; ++p)
            path.I[static_cast<size_t>(k) * d + p] = spec.I0[p] + spec.sigma * l1.at(k, static_cast<int>(p));

    std::vector<double> w_prev(d), w_cur(d), work(d);
    eval_omega(sys, spec, path.I.data(), spec.grid.time(0), work.data(), w_prev.data(),
               path.repaired_evals);
    for (size_t p = 0; p < d; ++p) path.freq_integral[p] = 0.0;
    double half_dt = 0.5 * spec.grid.dt;
    for (int64_t k = 1; k < pts; ++k) {
        const double* row = path.I.data() + static_cast<size_t>(k) * d;
        eval_omega(sys, spec, row, spec.grid.time(k), work.data(), w_cur.data(),
                   path.repaired_evals);
        for (size_t p = 0; p < d; ++p) {
            size_t idx = static_cast<size_t>(k) * d + p;
            path.freq_integral[idx] =
                path.freq_integral[idx - d] + half_dt * (w_prev[p] + w_cur[p]);
        }
        std::swap(w_prev, w_cur);
    }

    for (int64_t k = 0; k < pts; ++k)
        for (size_t p = 0; p < d; ++p) {
            size_t idx = static_cast<size_t>(k) * d + p;
            path.theta[idx] =
                spec.theta0[p] + path.freq_integral[idx] + spec.zeta * l2.at(k, static_cast<int>(p));
        }
    return path;
}

BirkhoffResult birkhoff_average(const System& sys, const SimSpec& spec, double horizon,
                                int64_t replicas, uint64_t master) {
    if (!(horizon > 0.0)) throw SpecError("birkhoff average: horizon must be positive");
    if (replicas < 2) throw SpecError("birkhoff average: need at least 2 replicas");
    if (!(horizon >= 100.0 * spec.grid.dt))
        throw SpecError("birkhoff average: horizon must be much larger than dt");

    SimSpec run = spec;
    run.grid.t0 = 0.0;
    run.grid.steps = static_cast<int64_t>(std::ceil(horizon / spec.grid.dt - 1e-9));
    size_t d = sys.dim();
    int64_t k_end = run.grid.steps;
    int64_t k_half = k_end / 2;
    double t_end = run.grid.time(k_end);
    double t_half = run.grid.time(k_half);

    std::vector<double> sum(d, 0.0), sum_sq(d, 0.0), sum_half(d, 0.0);
    for (int64_t r = 0; r < replicas; ++r) {
        ActionAnglePath path = simulate(sys, run, master, static_cast<uint32_t>(r));
        for (size_t p = 0; p < d; ++p) {
            double full = path.freq(k_end, p) / t_end;
            double half = path.freq(k_half, p) / t_half;
            sum[p] += full;
            sum_sq[p] += full * full;
            sum_half[p] += half;
        }
    }

    BirkhoffResult res;
    res.horizon = t_end;
    res.replicas = replicas;
    res.w_bar.resize(d);
    res.se.resize(d);
    double R = static_cast<double>(replicas);
    for (size_t p = 0; p < d; ++p) {
        res.w_bar[p] = sum[p] / R;
        double var = std::max(0.0, (sum_sq[p] - R * res.w_bar[p] * res.w_bar[p]) / (R - 1.0));
        res.se[p] = std::sqrt(var / R);
        double half_mean = sum_half[p] / R;
        if (std::abs(res.w_bar[p] - half_mean) > 5.0 * res.se[p] && res.se[p] > 0.0)
            res.nonconverged = true;
        if (res.se[p] == 0.0 && res.w_bar[p] != half_mean) res.nonconverged = true;
    }
    return res;
}

} // namespace stochham
