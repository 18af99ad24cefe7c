#pragma once
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/density.hpp"
#include "core/rng.hpp"

namespace stochham {

// Uniform time grid. Times are always computed as t0 + k*dt (never by
// accumulation), so there is no drift in the grid itself.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int64_t steps = 0;

    double time(int64_t k) const { return t0 + static_cast<double>(k) * dt; }
    int64_t points() const { return steps + 1; }
    void validate() const;
};

// Finite-activity jump measure: piecewise-linear intensity on a compact
// support. kind "none" means absent.
struct JumpMeasureSpec {
    enum class Kind { none, finite_activity };
    Kind kind = Kind::none;
    PiecewiseLinearDensity density;

    bool present() const { return kind == Kind::finite_activity; }
    double total_mass() const { return present() ? density.total_mass() : 0.0; }
    double support_radius() const { return present() ? density.support_radius() : 0.0; }
};

// Generating triplet of a d-dimensional Levy process: drift vector, scalar
// diffusion coefficient, and per-component independent small/large jump
// measures (the same 1-D measures for every component). Small jumps must be
// supported strictly inside the unit ball, large jumps outside the open unit
// ball.
struct LevyTriplet {
    int dim = 1;
    std::vector<double> gamma;
    double xi = 0.0;
    JumpMeasureSpec small_jumps;
    JumpMeasureSpec large_jumps;

    void validate() const;
    bool has_jumps() const { return small_jumps.present() || large_jumps.present(); }
};

// Discretized path on a grid; values[k*dim + c] is component c at grid index
// k. values at index 0 are identically zero.
struct NoisePath {
    TimeGrid grid;
    int dim = 1;
    std::vector<double> values;

    double at(int64_t k, int c) const { return values[static_cast<size_t>(k) * dim + c]; }
    double& at(int64_t k, int c) { return values[static_cast<size_t>(k) * dim + c]; }
};

// Seed context: which master key and which replica/role the sub-streams
// belong to. Each path summand (diffusion / small jumps / large jumps) draws
// from its own sub-stream, so configurations that toggle one summand leave
// the others' draws untouched.
struct StreamCtx {
    uint64_t master = 0;
    uint32_t replica = 0;
    Role role = Role::standalone;

    Stream stream(Summand s) const { return Stream(master, stream_id(replica, role, s)); }
};

NoisePath sample_brownian(const TimeGrid& grid, int dim, const StreamCtx& ctx);

// Compound-Poisson part with compensator removed: sum of jumps minus
// t * integral of z d(nu). Jump arrivals are binned to the next grid point.
NoisePath sample_compensated_small_jumps(const JumpMeasureSpec& spec, const TimeGrid& grid,
                                         int dim, const StreamCtx& ctx);

// Raw compound-Poisson part (no compensation) for the large jumps.
NoisePath sample_large_jumps(const JumpMeasureSpec& spec, const TimeGrid& grid, int dim,
                             const StreamCtx& ctx);

// Full decomposition: drift + diffusion + compensated small jumps
// + large jumps (the last dropped when interlace is on).
NoisePath sample_levy(const LevyTriplet& triplet, const TimeGrid& grid, const StreamCtx& ctx,
                      bool interlace);

// Analytic characteristic function of the scalar projection <u, X(t)> under
// the triplet (the Levy-Khintchine formula); include_large mirrors the
// interlace flag of the sampler. Jump integrals by adaptive quadrature.
std::complex<double> levy_cf(const LevyTriplet& triplet, const std::vector<double>& u, double t,
                             bool include_large, double quad_tol = 1e-10);

} // namespace stochham
