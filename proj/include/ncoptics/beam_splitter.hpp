#pragma once

// Two-mode mixing of a Fock-basis state with a vacuum ancilla. A beam
// splitter with transmittance t = cos(theta/2) and reflectance
// r = -e^{-i phi} sin(theta/2) maps |n, 0> to a binomial superposition
// sum_q sqrt(C(n, q)) t^q r^{n-q} |q, n-q>, so a truncated input vector
// c_0..c_N produces amplitudes on the triangle q + m <= N.

#include "ncoptics/state_builder.hpp"

namespace ncoptics {

struct BeamSplitterConfig {
    double theta = 0.0;
    double phi = 0.0;
    cplx r{0.0, 0.0};
    double t = 1.0;
};

inline BeamSplitterConfig make_config(double theta, double phi) {
    BeamSplitterConfig c;
    c.theta = theta;
    c.phi = phi;
    c.t = std::cos(theta / 2.0);
    c.r = -std::exp(cplx{0.0, -phi}) * std::sin(theta / 2.0);
    return c;
}

// Triangular two-mode amplitude table: at(q, m) is the amplitude on
// |q>|m>, stored for q + m <= truncation only; everything beyond the
// triangle is exactly zero because the input vector is.
struct BipartiteAmplitudes {
    unsigned truncation = 0;
    std::vector<std::vector<cplx>> amps;  // amps[q][m], m <= truncation - q

    const cplx& at(unsigned q, unsigned m) const { return amps[q][m]; }

    double norm_squared() const {
        KahanSum s;
        for (const auto& row : amps)
            for (const cplx& a : row) s.add(std::norm(a));
        return s.value();
    }
};

inline BipartiteAmplitudes mix_with_vacuum(const FockVector& input,
                                           const BeamSplitterConfig& bs) {
    KahanSum in_norm;
    for (const cplx& c : input.coeffs) in_norm.add(std::norm(c));
    if (std::abs(in_norm.value() - 1.0) > 1e-6)
        throw std::invalid_argument("mix_with_vacuum: input vector is not normalized");

    const unsigned N = input.truncation;
    std::vector<double> lf(N + 1);
    for (unsigned n = 0; n <= N; ++n) lf[n] = log_factorial(n);

    // |t|, |r| <= 1, so plain power tables never overflow and underflow to
    // an exact zero only where the amplitude is negligible anyway.
    std::vector<double> tp(N + 1);
    std::vector<cplx> rp(N + 1);
    tp[0] = 1.0;
    rp[0] = {1.0, 0.0};
    for (unsigned i = 1; i <= N; ++i) {
        tp[i] = tp[i - 1] * bs.t;
        rp[i] = rp[i - 1] * bs.r;
    }

    BipartiteAmplitudes out;
    out.truncation = N;
    out.amps.resize(N + 1);
    for (unsigned q = 0; q <= N; ++q) {
        out.amps[q].resize(N - q + 1);
        for (unsigned m = 0; m + q <= N; ++m) {
            unsigned n = q + m;
            double root_binom = std::exp(0.5 * (lf[n] - lf[q] - lf[m]));
            out.amps[q][m] = input.coeffs[n] * (root_binom * tp[q]) * rp[m];
        }
    }
    return out;
}

}  // namespace ncoptics
