#include "core/pendulum.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace stochham {

double Pendulum::omega() const {
    if (!(g > 0.0) || !(l > 0.0)) throw SpecError("pendulum: g and l must be positive");
    return std::sqrt(g / l);
}

double Pendulum::period() const {
    return 2.0 * M_PI / omega();
}

std::vector<Equilibrium> classify_equilibria(const Pendulum& p, int k_min, int k_max) {
    if (k_min > k_max) throw SpecError("classify_equilibria: empty index range");
    double w = p.omega();
    std::vector<Equilibrium> out;
    out.reserve(static_cast<size_t>(k_max - k_min + 1));
    for (int k = k_min; k <= k_max; ++k) {
        Equilibrium e;
        e.q = k * M_PI;
        if (k % 2 == 0) {
            e.kind = EquilibriumKind::center;
            e.imag_part = w;
        } else {
            e.kind = EquilibriumKind::saddle;
            e.real_part = w;
        }
        out.push_back(e);
    }
    return out;
}

} // namespace stochham
