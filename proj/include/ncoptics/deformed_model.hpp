#pragma once

// Minimal-length deformed oscillator model: the dimensionless deformation
// parameter tau, the ladder eigenvalue function k(n) = A n + B n^2 with
// A = 1 + tau/2 and B = tau/2, the f-oscillator function f(n) = sqrt(A + B n)
// (so k(n) = n f(n)^2), the generalized factorial rho(n) = prod k(i) carried
// in log form, and the first-order perturbed eigenstates mixing |n +- 4>.
// Units: hbar = omega = m = 1; only tau enters any computation.

#include <map>
#include <optional>
#include <string>

#include "ncoptics/numerics.hpp"

namespace ncoptics {

struct DeformedOscillator {
    double tau = 0.0;
    double A = 1.0;  // 1 + tau/2
    double B = 0.0;  // tau/2

    DeformedOscillator() = default;
    explicit DeformedOscillator(double tau_) : tau(tau_), A(1.0 + tau_ / 2.0), B(tau_ / 2.0) {
        if (tau_ < 0.0) throw std::invalid_argument("DeformedOscillator: tau must be >= 0");
    }
};

// First-order eigenstate of the deformed Hamiltonian in the Fock basis:
// coefficient 1 at `center`, tau/16-weighted admixtures at center +- 4.
struct EigenstateExpansion {
    unsigned center = 0;
    std::map<unsigned, double> terms;
};

inline double k(const DeformedOscillator& m, unsigned n) {
    double nd = static_cast<double>(n);
    return m.A * nd + m.B * nd * nd;
}

inline double f(const DeformedOscillator& m, unsigned n) {
    return std::sqrt(m.A + m.B * static_cast<double>(n));
}

// Dimensionless energy e_n = A n + B n^2 (coincides with k(n)).
inline double energy(const DeformedOscillator& m, unsigned n) { return k(m, n); }

// ln rho(n) = sum_{i=1}^{n} ln k(i); rho(0) = 1.
inline double log_rho(const DeformedOscillator& m, unsigned n) {
    KahanSum s;
    for (unsigned i = 1; i <= n; ++i) s.add(std::log(k(m, i)));
    return s.value();
}

// Cumulative table ln rho(0..n_max).
inline std::vector<double> log_rho_table(const DeformedOscillator& m, unsigned n_max) {
    std::vector<double> t(n_max + 1, 0.0);
    KahanSum s;
    for (unsigned i = 1; i <= n_max; ++i) {
        s.add(std::log(k(m, i)));
        t[i] = s.value();
    }
    return t;
}

// ln f(n)! with f(m)! = prod_{i=1}^{m} f(i), f(0)! = 1.
inline double log_f_factorial(const DeformedOscillator& m, unsigned n) {
    KahanSum s;
    for (unsigned i = 1; i <= n; ++i) s.add(0.5 * std::log(m.A + m.B * static_cast<double>(i)));
    return s.value();
}

inline std::vector<double> log_f_factorial_table(const DeformedOscillator& m, unsigned n_max) {
    std::vector<double> t(n_max + 1, 0.0);
    KahanSum s;
    for (unsigned i = 1; i <= n_max; ++i) {
        s.add(0.5 * std::log(m.A + m.B * static_cast<double>(i)));
        t[i] = s.value();
    }
    return t;
}

// ln(f(n)!) - ln(f(target)!) for the +-4 index shifts used by the
// perturbative coefficients. Other shifts are rejected.
inline double f_factorial_log_ratio(const DeformedOscillator& m, unsigned n, unsigned target) {
    if (target == n + 4) {
        KahanSum s;
        for (unsigned i = n + 1; i <= n + 4; ++i)
            s.add(0.5 * std::log(m.A + m.B * static_cast<double>(i)));
        return -s.value();
    }
    if (n >= 4 && target == n - 4) {
        KahanSum s;
        for (unsigned i = n - 3; i <= n; ++i)
            s.add(0.5 * std::log(m.A + m.B * static_cast<double>(i)));
        return s.value();
    }
    throw std::invalid_argument("f_factorial_log_ratio: |n - target| must be 4");
}

// |phi_n> = |n> - tau/16 sqrt((n-3)^(4)) |n-4> + tau/16 sqrt((n+1)^(4)) |n+4>,
// with Q^(4) the rising factorial. At tau = 0 the map is just {n: 1}.
inline EigenstateExpansion perturbed_eigenstate(const DeformedOscillator& m, unsigned n) {
    EigenstateExpansion e;
    e.center = n;
    e.terms[n] = 1.0;
    if (m.tau == 0.0) return e;
    e.terms[n + 4] = m.tau / 16.0 * std::sqrt(pochhammer_rising(static_cast<double>(n) + 1.0, 4));
    if (n >= 4)
        e.terms[n - 4] = -m.tau / 16.0 * std::sqrt(pochhammer_rising(static_cast<double>(n) - 3.0, 4));
    return e;
}

// The perturbative expansion is first order in tau; flag use beyond tau = 1.
inline std::optional<std::string> tau_regime_note(double tau) {
    if (tau > 1.0)
        return "tau = " + std::to_string(tau) +
               " exceeds 1; first-order perturbative coefficients are unreliable here";
    return std::nullopt;
}

}  // namespace ncoptics
