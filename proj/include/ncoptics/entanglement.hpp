#pragma once

// Entanglement measures for the two-mode output state: reduced density
// matrix by partial trace, linear entropy from the Frobenius purity, and
// von Neumann entropy via a cyclic Jacobi eigensolver for complex
// Hermitian matrices. A brute-force quadruple-sum purity evaluation is
// included as an independent cross-check path.

#include <functional>

#include "ncoptics/beam_splitter.hpp"

namespace ncoptics {

// Dense Hermitian matrix, row-major.
struct DensityMatrix {
    unsigned dim = 0;
    std::vector<cplx> a;

    explicit DensityMatrix(unsigned d = 0) : dim(d), a(static_cast<size_t>(d) * d) {}

    cplx& at(unsigned i, unsigned j) { return a[static_cast<size_t>(i) * dim + j]; }
    const cplx& at(unsigned i, unsigned j) const { return a[static_cast<size_t>(i) * dim + j]; }

    double trace_real() const {
        KahanSum s;
        for (unsigned i = 0; i < dim; ++i) s.add(at(i, i).real());
        return s.value();
    }
};

// Trace out the second mode: rho[q][s] = sum_m amps(q, m) conj(amps(s, m)),
// the sum running over the shared triangle m <= N - max(q, s).
inline DensityMatrix reduce_over_second(const BipartiteAmplitudes& out) {
    const unsigned N = out.truncation;
    DensityMatrix rho(N + 1);
    for (unsigned q = 0; q <= N; ++q) {
        for (unsigned s = q; s <= N; ++s) {
            KahanSumComplex acc;
            for (unsigned m = 0; m + s <= N; ++m)
                acc.add(out.at(q, m) * std::conj(out.at(s, m)));
            rho.at(q, s) = acc.value();
            rho.at(s, q) = std::conj(acc.value());
        }
    }
    return rho;
}

// tr(rho^2) as the squared Frobenius norm (rho is Hermitian).
inline double purity(const DensityMatrix& rho) {
    KahanSum s;
    for (const cplx& v : rho.a) s.add(std::norm(v));
    return s.value();
}

// S_L = 1 - tr(rho^2), left unclamped so a purity overshoot from rounding
// stays visible instead of silently becoming 0.
inline double linear_entropy(const DensityMatrix& rho) { return 1.0 - purity(rho); }

// Eigenvalues of a complex Hermitian matrix by cyclic Jacobi rotations.
// Each rotation U = [[c, -s e^{i phi}], [s e^{-i phi}, c]] (phi the phase
// of a_pq) annihilates one off-diagonal pair; sweeps repeat until the
// off-diagonal Frobenius norm falls below off_tol. Quadratic convergence
// makes max_sweeps generous; hitting it means the input was not Hermitian.
inline std::vector<double> hermitian_eigenvalues_jacobi(DensityMatrix m, double off_tol = 1e-12,
                                                        unsigned max_sweeps = 60) {
    const unsigned n = m.dim;
    if (n == 0) return {};
    if (n == 1) return {m.at(0, 0).real()};

    auto off_norm = [&]() {
        KahanSum s;
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = i + 1; j < n; ++j) s.add(2.0 * std::norm(m.at(i, j)));
        return std::sqrt(s.value());
    };

    auto diagonal = [&]() {
        std::vector<double> eig(n);
        for (unsigned i = 0; i < n; ++i) eig[i] = m.at(i, i).real();
        std::sort(eig.begin(), eig.end(), std::greater<>());
        return eig;
    };

    for (unsigned sweep = 0; sweep <= max_sweeps; ++sweep) {
        if (off_norm() < off_tol) return diagonal();
        if (sweep == max_sweeps) break;
        for (unsigned p = 0; p < n; ++p) {
            for (unsigned q = p + 1; q < n; ++q) {
                double apq = std::abs(m.at(p, q));
                if (apq == 0.0) continue;
                cplx phase = m.at(p, q) / apq;
                double theta = (m.at(q, q).real() - m.at(p, p).real()) / (2.0 * apq);
                // small-magnitude root of t^2 - 2 theta t - 1 = 0
                double t = (theta >= 0.0) ? -1.0 / (theta + std::sqrt(theta * theta + 1.0))
                                          : 1.0 / (-theta + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                for (unsigned k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    cplx kp = m.at(k, p), kq = m.at(k, q);
                    m.at(k, p) = c * kp + s * std::conj(phase) * kq;
                    m.at(k, q) = -s * phase * kp + c * kq;
                    m.at(p, k) = std::conj(m.at(k, p));
                    m.at(q, k) = std::conj(m.at(k, q));
                }
                double shift = t * apq;
                m.at(p, p) += shift;
                m.at(q, q) -= shift;
                m.at(p, q) = {0.0, 0.0};
                m.at(q, p) = {0.0, 0.0};
            }
        }
    }
    throw std::runtime_error("hermitian_eigenvalues_jacobi: no convergence; input not Hermitian?");
}

// S_vN = -sum lambda log2 lambda over the spectrum, eigenvalues clamped to
// [0, 1] and those at or below eig_floor treated as exact zeros.
inline double von_neumann_entropy(const std::vector<double>& eigenvalues,
                                  double eig_floor = 1e-14) {
    KahanSum s;
    for (double raw : eigenvalues) {
        double lam = std::clamp(raw, 0.0, 1.0);
        if (lam <= eig_floor) continue;
        s.add(-lam * std::log2(lam));
    }
    return s.value();
}

inline double von_neumann_entropy(const DensityMatrix& rho, double off_tol = 1e-12,
                                  unsigned max_sweeps = 60, double eig_floor = 1e-14) {
    return von_neumann_entropy(hermitian_eigenvalues_jacobi(rho, off_tol, max_sweeps), eig_floor);
}

struct EntanglementMeasures {
    double purity = 1.0;
    double linear_entropy = 0.0;
    double von_neumann = 0.0;
    bool has_von_neumann = false;
};

inline EntanglementMeasures entangle_and_measure(const FockVector& input,
                                                 const BeamSplitterConfig& bs,
                                                 bool with_von_neumann = false) {
    DensityMatrix rho = reduce_over_second(mix_with_vacuum(input, bs));
    EntanglementMeasures e;
    e.purity = purity(rho);
    e.linear_entropy = 1.0 - e.purity;
    if (with_von_neumann) {
        e.von_neumann = von_neumann_entropy(rho);
        e.has_von_neumann = true;
    }
    return e;
}

// Full record of one entanglement evaluation, parameters included.
struct EntropyResult {
    cplx alpha{0.0, 0.0};
    cplx zeta{0.0, 0.0};
    double tau = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    unsigned levels = 0;
    double linear_entropy = 0.0;
    double purity = 1.0;
    double von_neumann = 0.0;
    bool converged = true;
    double tail_mass = 0.0;
};

// Brute-force purity: expand tr(rho_A^2) into the explicit quadruple sum
//   N^4 sum_{q,s,m,n} c_{q+m} c*_{s+m} c*_{q+n} c_{s+n}
//       sqrt(C(q+m,q) C(s+m,s) C(q+n,q) C(s+n,s)) t^{2(q+s)} |r|^{2(m+n)}
// with 1/N^2 = sum_n |c_n|^2, all four indices on the truncation triangle.
// Every reflection phase cancels in conjugate pairs, which is why only
// |r| appears. Evaluated in log magnitude + unit phase form. O(N^4) and
// deliberately unrelated to the partial-trace code path; capped at small N
// since it exists only as a cross-check.
inline double purity_quadruple_sum(const std::vector<cplx>& coeffs,
                                   const BeamSplitterConfig& bs) {
    if (coeffs.empty()) throw std::invalid_argument("purity_quadruple_sum: empty state");
    const unsigned N = static_cast<unsigned>(coeffs.size() - 1);
    if (N > 12) throw std::invalid_argument("purity_quadruple_sum: cross-check path capped at 12 levels");

    std::vector<double> lmag(N + 1);
    std::vector<cplx> ph(N + 1);
    for (unsigned i = 0; i <= N; ++i) {
        double m = std::abs(coeffs[i]);
        lmag[i] = (m == 0.0) ? -std::numeric_limits<double>::infinity() : std::log(m);
        ph[i] = (m == 0.0) ? cplx{0.0, 0.0} : coeffs[i] / m;
    }

    std::vector<double> lf(N + 1);
    for (unsigned i = 0; i <= N; ++i) lf[i] = log_factorial(i);
    auto lbinom = [&](unsigned top, unsigned bottom) {
        return lf[top] - lf[bottom] - lf[top - bottom];
    };

    double abs_t = std::abs(bs.t), abs_r = std::abs(bs.r);
    double lt = (abs_t == 0.0) ? 0.0 : std::log(abs_t);
    double lr = (abs_r == 0.0) ? 0.0 : std::log(abs_r);

    KahanSum weight;
    for (const cplx& c : coeffs) weight.add(std::norm(c));
    double w = weight.value();

    KahanSumComplex total;
    for (unsigned q = 0; q <= N; ++q)
        for (unsigned s = 0; s <= N; ++s) {
            if (abs_t == 0.0 && q + s > 0) continue;
            for (unsigned m = 0; m + q <= N && m + s <= N; ++m)
                for (unsigned n = 0; n + q <= N && n + s <= N; ++n) {
                    if (abs_r == 0.0 && m + n > 0) continue;
                    double lg = lmag[q + m] + lmag[s + m] + lmag[q + n] + lmag[s + n];
                    if (!std::isfinite(lg)) continue;
                    lg += 0.5 * (lbinom(q + m, q) + lbinom(s + m, s) + lbinom(q + n, q) +
                                 lbinom(s + n, s));
                    if (q + s > 0) lg += 2.0 * (q + s) * lt;
                    if (m + n > 0) lg += 2.0 * (m + n) * lr;
                    cplx phase = ph[q + m] * std::conj(ph[s + m]) * std::conj(ph[q + n]) *
                                 ph[s + n];
                    total.add(std::exp(lg) * phase);
                }
        }
    return total.value().real() / (w * w);
}

inline double purity_quadruple_sum(const FockVector& input, const BeamSplitterConfig& bs) {
    return purity_quadruple_sum(input.coeffs, bs);
}

// Entropy from the quadruple sum, raw-coefficient input mode.
inline double entropy_quadruple_sum(const std::vector<cplx>& coeffs,
                                    const BeamSplitterConfig& bs) {
    return 1.0 - purity_quadruple_sum(coeffs, bs);
}

// Entropy from the fully literal series form, never touching normalized
// coefficients or binomials:
//   S = 1 - N^4 sum_{q,s,m,n} t^{2(q+s)} |r|^{2(m+n)}
//         S(m+q) S*(m+s) S(n+s) S*(n+q)
//         / (q! s! m! n! f(m+q)! f(m+s)! f(n+s)! f(n+q)!)
// with 1/N^2 = sum_{q+m<=N} |t|^{2q} |r|^{2m} |S(q+m)|^2 / (q! m! f(q+m)!^2),
// all factors carried as log magnitude + unit phase and shifted by the
// largest ln|S(n)/f(n)!| before exponentiation. Exists to cross-check the
// matrix path and the sqrt(rho) = sqrt(n!) f(n)! rewriting at once.
inline double entropy_quadruple_sum(const StateSpec& spec, const BeamSplitterConfig& bs,
                                    unsigned N) {
    if (N > 12)
        throw std::invalid_argument("entropy_quadruple_sum: cross-check path capped at 12 levels");

    StateSpec s = spec;
    if (!is_deformed(spec.family)) s.model = DeformedOscillator(0.0);
    std::vector<ScaledComplex> numerators = detail::state_numerators(s, N);
    std::vector<double> lff = log_f_factorial_table(s.model, N);

    // lg[n] = ln|S(n)/f(n)!| shifted so the largest is 0; ph[n] its phase.
    std::vector<double> lg(N + 1);
    std::vector<cplx> ph(N + 1);
    double top = -std::numeric_limits<double>::infinity();
    for (unsigned n = 0; n <= N; ++n) {
        lg[n] = numerators[n].is_zero() ? -std::numeric_limits<double>::infinity()
                                        : numerators[n].log_abs() - lff[n];
        ph[n] = numerators[n].unit_phase();
        top = std::max(top, lg[n]);
    }
    if (!std::isfinite(top)) throw std::invalid_argument("entropy_quadruple_sum: zero state");
    for (double& v : lg) v -= top;

    std::vector<double> lf(N + 1);
    for (unsigned i = 0; i <= N; ++i) lf[i] = log_factorial(i);

    double abs_t = std::abs(bs.t), abs_r = std::abs(bs.r);
    double lt = (abs_t == 0.0) ? 0.0 : std::log(abs_t);
    double lr = (abs_r == 0.0) ? 0.0 : std::log(abs_r);

    KahanSum inv_norm_sq;  // sum for 1/N^2, in the shifted scale
    for (unsigned q = 0; q <= N; ++q) {
        if (abs_t == 0.0 && q > 0) continue;
        for (unsigned m = 0; m + q <= N; ++m) {
            if (abs_r == 0.0 && m > 0) continue;
            double e = 2.0 * lg[q + m] - lf[q] - lf[m];
            if (!std::isfinite(e)) continue;
            if (q > 0) e += 2.0 * q * lt;
            if (m > 0) e += 2.0 * m * lr;
            inv_norm_sq.add(std::exp(e));
        }
    }

    KahanSumComplex total;
    for (unsigned q = 0; q <= N; ++q)
        for (unsigned s_i = 0; s_i <= N; ++s_i) {
            if (abs_t == 0.0 && q + s_i > 0) continue;
            for (unsigned m = 0; m + q <= N && m + s_i <= N; ++m)
                for (unsigned n = 0; n + q <= N && n + s_i <= N; ++n) {
                    if (abs_r == 0.0 && m + n > 0) continue;
                    double e = lg[m + q] + lg[m + s_i] + lg[n + s_i] + lg[n + q];
                    if (!std::isfinite(e)) continue;
                    e -= lf[q] + lf[s_i] + lf[m] + lf[n];
                    if (q + s_i > 0) e += 2.0 * (q + s_i) * lt;
                    if (m + n > 0) e += 2.0 * (m + n) * lr;
                    cplx phase = ph[m + q] * std::conj(ph[m + s_i]) * ph[n + s_i] *
                                 std::conj(ph[n + q]);
                    total.add(std::exp(e) * phase);
                }
        }

    double w = inv_norm_sq.value();
    return 1.0 - total.value().real() / (w * w);
}

}  // namespace ncoptics
