#pragma once

// Builders for normalized truncated Fock-space vectors of four state
// families: deformed-oscillator coherent and squeezed states (tau > 0) and
// their ordinary-oscillator limits. Unnormalized coefficients are assembled
// in mantissa*exp(scale) form and exponentiated relative to the running
// maximum, so sqrt(rho(n)) ~ 1e30+ never meets naive floating point.

#include <algorithm>

#include "ncoptics/deformed_model.hpp"
#include "ncoptics/numerics.hpp"

namespace ncoptics {

enum class StateFamily { nc_coherent, nc_squeezed, ho_squeezed, ho_coherent };

struct StateSpec {
    cplx alpha{0.0, 0.0};
    cplx zeta{0.0, 0.0};
    DeformedOscillator model;
    StateFamily family = StateFamily::nc_coherent;
};

inline bool is_coherent(StateFamily f) {
    return f == StateFamily::nc_coherent || f == StateFamily::ho_coherent;
}

inline bool is_deformed(StateFamily f) {
    return f == StateFamily::nc_coherent || f == StateFamily::nc_squeezed;
}

// Normalized truncated state vector with tail diagnostics. tail_mass is the
// one-term estimate |c~(N+1)|^2 / sum_{n<=N+1} |c~(n)|^2 of the probability
// weight lost to truncation; norm_log is ln of the pre-normalization norm.
struct FockVector {
    std::vector<cplx> coeffs;
    unsigned truncation = 0;
    double tail_mass = 0.0;
    double norm_log = 0.0;
};

struct ConvergedState {
    FockVector state;
    bool converged = false;
};

// Table of the recurrence solution I(alpha, zeta, n):
//   I(n+1) = alpha I(n) - zeta k(n) I(n-1),  I(0) = 1, I(1) = alpha.
struct RecurrenceTable {
    std::vector<ScaledComplex> values;

    cplx value(unsigned n) const { return values.at(n).value(); }
    size_t size() const { return values.size(); }
};

inline RecurrenceTable recurrence_I(cplx alpha, cplx zeta, const DeformedOscillator& model,
                                    unsigned n_max) {
    if (n_max < 1) throw std::invalid_argument("recurrence_I: n_max must be >= 1");
    RecurrenceTable t;
    t.values.resize(n_max + 1);
    t.values[0] = ScaledComplex::one();
    t.values[1] = ScaledComplex::from(alpha);
    for (unsigned n = 1; n < n_max; ++n)
        t.values[n + 1] = alpha * t.values[n] + (-zeta * k(model, n)) * t.values[n - 1];
    return t;
}

namespace detail {

inline cplx i_power(unsigned n) {
    switch (n % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace detail

// Closed-form solution of the recurrence,
//   I(n) = i^n (zeta B)^{n/2} (1 + A/B)^(n)
//          * 2F1(-n, 1/2 + A/(2B) + i alpha / (2 sqrt(zeta B)); 1 + A/B; 2),
// principal branches throughout. Singular at B = 0 or zeta = 0 (use the
// recurrence there). At alpha = 0 the 2F1 collapses to the exact Kummer
// value of 2F1(-n, b; 2b; 2): zero at odd n, (1/2)_m / (b+1/2)_m at n = 2m;
// the generic sum would return prefactor-amplified cancellation noise.
inline cplx closed_form_I(cplx alpha, cplx zeta, const DeformedOscillator& model, unsigned n) {
    if (model.B <= 0.0 || zeta == cplx{0.0, 0.0})
        throw std::domain_error("closed_form_I: singular at B = 0 or zeta = 0");
    if (n == 0) return {1.0, 0.0};

    cplx zb = zeta * model.B;
    double c = 1.0 + model.A / model.B;
    cplx prefactor = detail::i_power(n) * std::pow(zb, static_cast<double>(n) / 2.0) *
                     pochhammer_rising(c, n);

    if (alpha == cplx{0.0, 0.0}) {
        if (n % 2 == 1) return {0.0, 0.0};
        unsigned m = n / 2;
        double ratio = pochhammer_rising(0.5, m) /
                       pochhammer_rising(1.0 + model.A / (2.0 * model.B), m);
        return prefactor * ratio;
    }

    cplx b = 0.5 + model.A / (2.0 * model.B) + cplx{0.0, 1.0} * alpha / (2.0 * std::sqrt(zb));
    return prefactor * terminating_2f1(n, b, c, 2.0);
}

namespace detail {

// Unnormalized numerators S(alpha, zeta, n) for n = 0..n_hi: the base
// series I(n) (alpha^n for coherent families, the recurrence solution for
// the deformed squeezed family, the Hermite form (zeta/2)^{n/2} H_n(x) for
// the ordinary squeezed family) plus the first-order tau/16 corrections
//   S(n) = I(n) - tau/16 [f(n)!/f(n+4)!] I(n+4)
//          + (n >= 4) tau/16 [n!/(n-4)!] [f(n)!/f(n-4)!] I(n-4).
inline std::vector<ScaledComplex> state_numerators(const StateSpec& spec, unsigned n_hi) {
    const unsigned i_hi = n_hi + 4;
    std::vector<ScaledComplex> base(i_hi + 1);

    switch (spec.family) {
        case StateFamily::nc_coherent:
        case StateFamily::ho_coherent: {
            ScaledComplex p = ScaledComplex::one();
            for (unsigned n = 0; n <= i_hi; ++n) {
                base[n] = p;
                p *= spec.alpha;
            }
            break;
        }
        case StateFamily::nc_squeezed: {
            base = recurrence_I(spec.alpha, spec.zeta, spec.model, i_hi).values;
            break;
        }
        case StateFamily::ho_squeezed: {
            if (spec.zeta == cplx{0.0, 0.0})
                throw std::domain_error("ho_squeezed: zeta = 0; use the coherent builder");
            cplx x = spec.alpha / std::sqrt(2.0 * spec.zeta);
            cplx s = std::sqrt(spec.zeta / 2.0);
            ScaledComplex pw = ScaledComplex::one();
            ScaledComplex hm1 = ScaledComplex::one();
            ScaledComplex h = ScaledComplex::from(2.0 * x);
            for (unsigned n = 0; n <= i_hi; ++n) {
                ScaledComplex hn = (n == 0) ? hm1 : (n == 1 ? h : ScaledComplex::zero());
                if (n >= 2) {
                    hn = (2.0 * x) * h + cplx{-2.0 * static_cast<double>(n - 1), 0.0} * hm1;
                    hm1 = h;
                    h = hn;
                }
                base[n] = pw * hn;
                pw *= s;
            }
            break;
        }
    }

    double tau = is_deformed(spec.family) ? spec.model.tau : 0.0;
    if (tau == 0.0) {
        base.resize(n_hi + 1);
        return base;
    }

    const DeformedOscillator& m = spec.model;
    std::vector<ScaledComplex> out(n_hi + 1);
    for (unsigned n = 0; n <= n_hi; ++n) {
        ScaledComplex up = base[n + 4];
        up *= cplx{-tau / 16.0, 0.0};
        up.mul_log(f_factorial_log_ratio(m, n, n + 4));
        out[n] = base[n] + up;
        if (n >= 4) {
            double nd = static_cast<double>(n);
            double perm = nd * (nd - 1.0) * (nd - 2.0) * (nd - 3.0);  // n!/(n-4)!
            ScaledComplex down = base[n - 4];
            down *= cplx{tau / 16.0 * perm, 0.0};
            down.mul_log(f_factorial_log_ratio(m, n, n - 4));
            out[n] = out[n] + down;
        }
    }
    return out;
}

// Shift by the running max, normalize over 0..N, estimate the tail from
// index N+1.
inline FockVector finish_state(const std::vector<ScaledComplex>& numerators,
                               const DeformedOscillator& model, unsigned truncation) {
    const unsigned N = truncation;
    std::vector<double> lrho = log_rho_table(model, N + 1);

    std::vector<double> log_abs(N + 2);
    std::vector<cplx> phase(N + 2);
    double top = -std::numeric_limits<double>::infinity();
    for (unsigned n = 0; n <= N + 1; ++n) {
        const ScaledComplex& s = numerators[n];
        log_abs[n] = s.is_zero() ? -std::numeric_limits<double>::infinity()
                                 : s.log_abs() - 0.5 * lrho[n];
        phase[n] = s.unit_phase();
        if (n <= N) top = std::max(top, log_abs[n]);
    }
    if (!std::isfinite(top)) throw std::invalid_argument("state builder: zero state vector");

    KahanSum weight;
    for (unsigned n = 0; n <= N; ++n)
        if (std::isfinite(log_abs[n])) weight.add(std::exp(2.0 * (log_abs[n] - top)));
    double w = weight.value();

    double w_tail =
        std::isfinite(log_abs[N + 1]) ? std::exp(2.0 * (log_abs[N + 1] - top)) : 0.0;

    FockVector v;
    v.truncation = N;
    v.tail_mass = w_tail / (w + w_tail);
    v.norm_log = top + 0.5 * std::log(w);
    v.coeffs.resize(N + 1);
    double inv_norm = 1.0 / std::sqrt(w);
    for (unsigned n = 0; n <= N; ++n)
        v.coeffs[n] = std::isfinite(log_abs[n])
                          ? phase[n] * (std::exp(log_abs[n] - top) * inv_norm)
                          : cplx{0.0, 0.0};
    return v;
}

}  // namespace detail

inline FockVector build_state(const StateSpec& spec, unsigned truncation) {
    if (is_coherent(spec.family) && spec.zeta != cplx{0.0, 0.0})
        throw std::invalid_argument("coherent families require zeta = 0");
    if (spec.family == StateFamily::nc_squeezed && spec.zeta == cplx{0.0, 0.0})
        throw std::invalid_argument("nc_squeezed requires zeta != 0; use nc_coherent");
    if (spec.family == StateFamily::ho_squeezed && spec.zeta == cplx{0.0, 0.0})
        throw std::invalid_argument("ho_squeezed requires zeta != 0; use ho_coherent");
    if (is_deformed(spec.family) && truncation < 8)
        throw std::invalid_argument("deformed builders require truncation >= 8");

    DeformedOscillator effective = is_deformed(spec.family) ? spec.model : DeformedOscillator(0.0);
    StateSpec s = spec;
    s.model = effective;
    return detail::finish_state(detail::state_numerators(s, truncation + 1), effective,
                                truncation);
}

inline FockVector nc_coherent(cplx alpha, const DeformedOscillator& model, unsigned truncation) {
    return build_state({alpha, {0.0, 0.0}, model, StateFamily::nc_coherent}, truncation);
}

inline FockVector nc_squeezed(cplx alpha, cplx zeta, const DeformedOscillator& model,
                              unsigned truncation) {
    return build_state({alpha, zeta, model, StateFamily::nc_squeezed}, truncation);
}

inline FockVector ho_squeezed(cplx alpha, cplx zeta, unsigned truncation) {
    return build_state({alpha, zeta, DeformedOscillator(0.0), StateFamily::ho_squeezed},
                       truncation);
}

inline FockVector ho_coherent(cplx alpha, unsigned truncation) {
    return build_state({alpha, {0.0, 0.0}, DeformedOscillator(0.0), StateFamily::ho_coherent},
                       truncation);
}

// Normalize raw coefficients by the Euclidean norm (compensated, scaled by
// the largest magnitude so inputs spanning hundreds of orders survive).
inline FockVector normalize(const std::vector<cplx>& raw) {
    if (raw.empty()) throw std::invalid_argument("normalize: empty coefficient vector");
    double top = 0.0;
    for (const cplx& c : raw) top = std::max(top, std::abs(c));
    if (top == 0.0) throw std::invalid_argument("normalize: zero vector");

    KahanSum s;
    for (const cplx& c : raw) {
        double t = std::abs(c) / top;
        s.add(t * t);
    }
    double root = std::sqrt(s.value());

    FockVector v;
    v.truncation = static_cast<unsigned>(raw.size() - 1);
    v.tail_mass = 0.0;
    v.norm_log = std::log(top) + 0.5 * std::log(s.value());
    v.coeffs.resize(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) v.coeffs[i] = (raw[i] / top) / root;
    return v;
}

// Double the truncation from N_start until the tail estimate drops below
// tail_tol or N_max is reached. Non-convergence is a flag, not an error.
inline ConvergedState converge_truncation(const StateSpec& spec, double tail_tol,
                                          unsigned n_start, unsigned n_max) {
    if (n_start < 8 || n_max < n_start)
        throw std::invalid_argument("converge_truncation: need 8 <= N_start <= N_max");
    unsigned n = n_start;
    for (;;) {
        FockVector v = build_state(spec, n);
        if (v.tail_mass < tail_tol) return {std::move(v), true};
        if (n >= n_max) return {std::move(v), false};
        n = std::min(2 * n, n_max);
    }
}

}  // namespace ncoptics
