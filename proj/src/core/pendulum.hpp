#pragma once
#include <string>
#include <vector>

namespace stochham {

// Planar pendulum with Hamiltonian H(q, p) = p^2/(2 m l^2) - m g l cos(q),
// used here only through its small-oscillation normal form: near the stable
// equilibrium the angular frequency is omega = sqrt(g/l), independent of the
// action, so the rotation number of the perturbed action plays no role and
// the frequency map is the constant map I -> sqrt(g/l).
struct Pendulum {
    double g = 9.81; // gravitational acceleration
    double l = 1.0;  // rod length

    double omega() const;  // sqrt(g/l)
    double period() const; // 2 pi sqrt(l/g)
};

enum class EquilibriumKind { center, saddle };

struct Equilibrium {
    double q = 0.0;
    EquilibriumKind kind = EquilibriumKind::center;
    // Eigenvalues of the linearization: center -> +/- i |lambda| (imag_part),
    // saddle -> +/- |lambda| (real_part); the other field is zero.
    double real_part = 0.0;
    double imag_part = 0.0;
};

// Equilibria q = k pi for k in [k_min, k_max]: even multiples are centers
// (linearization eigenvalues +/- i sqrt(g/l)), odd multiples are saddles
// (eigenvalues +/- sqrt(g/l)).
std::vector<Equilibrium> classify_equilibria(const Pendulum& p, int k_min, int k_max);

} // namespace stochham
