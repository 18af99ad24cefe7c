#include "core/noise.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/quadrature.hpp"

namespace stochham {

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw SpecError("time grid: dt must be positive");
    if (steps < 1) throw SpecError("time grid: needs at least one step (empty path)");
    if (!std::isfinite(t0)) throw SpecError("time grid: t0 must be finite");
}

void LevyTriplet::validate() const {
    if (dim < 1) throw SpecError("levy triplet: dim must be >= 1");
    if (!gamma.empty() && static_cast<int>(gamma.size()) != dim)
        throw SpecError("levy triplet: drift vector length differs from dim");
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw SpecError("levy triplet: diffusion coefficient must be >= 0");
    if (small_jumps.present()) {
        const auto& d = small_jumps.density;
        if (d.support_lo() <= -1.0 || d.support_hi() >= 1.0)
            throw SpecError("levy triplet: small jumps must be supported strictly inside "
                            "the unit ball");
    }
    if (large_jumps.present()) {
        const auto& d = large_jumps.density;
        // The support must avoid the open unit ball; a piecewise-linear
        // density on a single interval does so iff the interval lies entirely
        // in |z| >= 1.
        bool ok = d.support_lo() >= 1.0 || d.support_hi() <= -1.0;
        if (!ok)
            throw SpecError("levy triplet: large jumps must be supported outside the open "
                            "unit ball");
    }
    // Finite activity with bounded density makes the min(z^2, 1) integral
    // finite automatically; verify by quadrature anyway per contract.
    for (const JumpMeasureSpec* spec : {&small_jumps, &large_jumps}) {
        if (!spec->present()) continue;
        const auto& d = spec->density;
        double check = adaptive_simpson(
            [&d](double z) { return std::min(z * z, 1.0) * d.value(z); }, d.support_lo(),
            d.support_hi(), 1e-10);
        if (!std::isfinite(check))
            throw SpecError("levy triplet: jump measure fails the min(z^2,1) "
                            "integrability check");
    }
}

NoisePath sample_brownian(const TimeGrid& grid, int dim, const StreamCtx& ctx) {
    grid.validate();
    if (dim < 1) throw SpecError("sample_brownian: dim must be >= 1");
    NoisePath path;
    path.grid = grid;
    path.dim = dim;
    path.values.assign(static_cast<size_t>(grid.points()) * dim, 0.0);
    Stream rng = ctx.stream(Summand::diffusion);
    double sdt = std::sqrt(grid.dt);
    for (int64_t k = 1; k <= grid.steps; ++k)
        for (int c = 0; c < dim; ++c)
            path.at(k, c) = path.at(k - 1, c) + sdt * rng.normal();
    return path;
}

namespace {

NoisePath sample_jump_part(const JumpMeasureSpec& spec, const TimeGrid& grid, int dim,
                           const StreamCtx& ctx, Summand summand, bool compensate) {
    grid.validate();
    if (dim < 1) throw SpecError("jump sampler: dim must be >= 1");
    NoisePath path;
    path.grid = grid;
    path.dim = dim;
    path.values.assign(static_cast<size_t>(grid.points()) * dim, 0.0);
    if (!spec.present()) return path;

    const auto& density = spec.density;
    double rate = density.total_mass();
    // Compensator drift per unit time: integral of z d(nu); exact closed form
    // for the piecewise-linear intensity.
    double drift = compensate ? density.moment(1) : 0.0;
    Stream rng = ctx.stream(summand);
    for (int64_t k = 1; k <= grid.steps; ++k) {
        for (int c = 0; c < dim; ++c) {
            // Jumps arriving in (t_{k-1}, t_k] are binned to grid index k.
            uint64_t count = rng.poisson(rate * grid.dt);
            double inc = -drift * grid.dt;
            for (uint64_t j = 0; j < count; ++j) inc += density.sample(rng);
            path.at(k, c) = path.at(k - 1, c) + inc;
        }
    }
    return path;
}

} // namespace

NoisePath sample_compensated_small_jumps(const JumpMeasureSpec& spec, const TimeGrid& grid,
                                         int dim, const StreamCtx& ctx) {
    if (spec.present()) {
        const auto& d = spec.density;
        if (d.support_lo() <= -1.0 || d.support_hi() >= 1.0)
            throw SpecError("small-jump sampler: support must lie strictly inside the "
                            "unit ball");
    }
    return sample_jump_part(spec, grid, dim, ctx, Summand::small_jumps, true);
}

NoisePath sample_large_jumps(const JumpMeasureSpec& spec, const TimeGrid& grid, int dim,
                             const StreamCtx& ctx) {
    return sample_jump_part(spec, grid, dim, ctx, Summand::large_jumps, false);
}

NoisePath sample_levy(const LevyTriplet& triplet, const TimeGrid& grid, const StreamCtx& ctx,
                      bool interlace) {
    triplet.validate();
    grid.validate();
    NoisePath path;
    path.grid = grid;
    path.dim = triplet.dim;
    path.values.assign(static_cast<size_t>(grid.points()) * triplet.dim, 0.0);

    if (triplet.xi > 0.0) {
        NoisePath bm = sample_brownian(grid, triplet.dim, ctx);
        for (size_t i = 0; i < path.values.size(); ++i)
            path.values[i] += triplet.xi * bm.values[i];
    }
    if (triplet.small_jumps.present()) {
        NoisePath sj = sample_compensated_small_jumps(triplet.small_jumps, grid, triplet.dim, ctx);
        for (size_t i = 0; i < path.values.size(); ++i) path.values[i] += sj.values[i];
    }
    if (!interlace && triplet.large_jumps.present()) {
        NoisePath lj = sample_large_jumps(triplet.large_jumps, grid, triplet.dim, ctx);
        for (size_t i = 0; i < path.values.size(); ++i) path.values[i] += lj.values[i];
    }
    if (!triplet.gamma.empty()) {
        for (int64_t k = 1; k <= grid.steps; ++k) {
            double elapsed = grid.time(k) - grid.t0;
            for (int c = 0; c < triplet.dim; ++c)
                path.at(k, c) += triplet.gamma[c] * elapsed;
        }
    }
    return path;
}

std::complex<double> levy_cf(const LevyTriplet& triplet, const std::vector<double>& u, double t,
                             bool include_large, double quad_tol) {
    triplet.validate();
    if (static_cast<int>(u.size()) != triplet.dim)
        throw SpecError("levy_cf: frequency vector length differs from dim");
    const std::complex<double> I(0.0, 1.0);
    std::complex<double> exponent(0.0, 0.0);

    double u_dot_gamma = 0.0;
    double u_norm2 = 0.0;
    for (int c = 0; c < triplet.dim; ++c) {
        if (!triplet.gamma.empty()) u_dot_gamma += u[c] * triplet.gamma[c];
        u_norm2 += u[c] * u[c];
    }
    exponent += I * u_dot_gamma - 0.5 * triplet.xi * triplet.xi * u_norm2;

    // Per-component independent jump measures: the joint CF factorizes, so
    // the exponent is the sum of 1-D jump integrals at each u component.
    auto jump_integral = [&](const PiecewiseLinearDensity& d, double uc, bool compensated) {
        QuadStats st;
        auto f = [&](double z) {
            std::complex<double> e = std::exp(I * (uc * z)) - 1.0;
            if (compensated) e -= I * (uc * z);
            return e * d.value(z);
        };
        std::complex<double> val(0.0, 0.0);
        const auto& xs = d.nodes_x();
        for (size_t c = 0; c + 1 < xs.size(); ++c) {
            val += adaptive_simpson(f, xs[c], xs[c + 1], quad_tol, &st);
            if (!st.converged)
                throw NumericError("levy_cf: jump-measure quadrature did not converge; "
                                   "residual estimate " +
                                   std::to_string(st.err_estimate));
        }
        return val;
    };

    for (int c = 0; c < triplet.dim; ++c) {
        if (triplet.small_jumps.present())
            exponent += jump_integral(triplet.small_jumps.density, u[c], true);
        if (include_large && triplet.large_jumps.present())
            exponent += jump_integral(triplet.large_jumps.density, u[c], false);
    }
    return std::exp(t * exponent);
}

} // namespace stochham
