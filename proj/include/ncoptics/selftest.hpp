#pragma once

// Built-in cross-check suite: analytic fixed points and path-equivalence
// oracles that exercise the full pipeline without any external data. Each
// check reports the observed deviation and its bound; the CLI `selftest`
// subcommand prints one line per check.

#include "ncoptics/sweep.hpp"

namespace ncoptics {

struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;  // deviation actually measured
    double bound = 0.0;     // tolerance it must stay below
};

inline std::vector<CheckResult> run_selftest() {
    std::vector<CheckResult> checks;
    auto record = [&](const std::string& name, double observed, double bound) {
        checks.push_back({name, observed <= bound, observed, bound});
    };
    const double pi_half = 1.5707963267948966;

    {  // single photon through a balanced splitter: S_L = 1/2, S_vN = 1 bit
        FockVector photon = normalize({{0.0, 0.0}, {1.0, 0.0}});
        DensityMatrix rho = reduce_over_second(mix_with_vacuum(photon, make_config(pi_half, 0.0)));
        record("single_photon_linear_entropy", std::abs(linear_entropy(rho) - 0.5), 1e-12);
        record("single_photon_von_neumann", std::abs(von_neumann_entropy(rho) - 1.0), 1e-9);
    }

    {  // vacuum input stays a product state exactly
        FockVector vac = normalize({{1.0, 0.0}, {0.0, 0.0}});
        EntanglementMeasures m = entangle_and_measure(vac, make_config(pi_half, 0.0));
        record("vacuum_zero_entropy", std::abs(m.linear_entropy), 1e-14);
    }

    {  // recurrence vs hypergeometric closed form
        double worst = 0.0;
        DeformedOscillator model(0.5);
        for (cplx zeta : {cplx{0.25, 0.0}, cplx{0.75, 0.0}})
            for (cplx alpha : {cplx{0.0, 0.0}, cplx{1.0, 0.0}}) {
                RecurrenceTable t = recurrence_I(alpha, zeta, model, 20);
                for (unsigned n = 0; n <= 20; ++n) {
                    cplx direct = closed_form_I(alpha, zeta, model, n);
                    double dev = std::abs(t.value(n) - direct) /
                                 std::max(std::abs(t.value(n)), 1.0);
                    worst = std::max(worst, dev);
                }
            }
        record("recurrence_vs_closed_form", worst, 1e-9);
    }

    {  // deformation switched off reproduces the Hermite-form state
        FockVector a = nc_squeezed({1.0, 0.0}, {0.25, 0.0}, DeformedOscillator(0.0), 30);
        FockVector b = ho_squeezed({1.0, 0.0}, {0.25, 0.0}, 30);
        double worst = 0.0;
        for (unsigned n = 0; n <= 30; ++n)
            worst = std::max(worst, std::abs(a.coeffs[n] - b.coeffs[n]));
        record("tau_zero_reduction", worst, 1e-9);
    }

    {  // matrix path vs literal quadruple-sum series
        StateSpec spec{{1.0, 0.0}, {0.5, 0.0}, DeformedOscillator(0.5),
                       StateFamily::nc_squeezed};
        BeamSplitterConfig bs = make_config(pi_half, 0.0);
        EntanglementMeasures m = entangle_and_measure(build_state(spec, 10), bs);
        double series = entropy_quadruple_sum(spec, bs, 10);
        record("quadruple_sum_equivalence", std::abs(m.linear_entropy - series), 1e-10);
    }

    {  // ordinary coherent input produces (almost) no entanglement
        ConvergedState cs = converge_truncation(
            {{1.0, 0.0}, {0.0, 0.0}, DeformedOscillator(0.0), StateFamily::ho_coherent}, 1e-10,
            8, 256);
        EntanglementMeasures m = entangle_and_measure(cs.state, make_config(pi_half, 0.0));
        record("coherent_classicality", std::abs(m.linear_entropy), 1e-6);
    }

    {  // splitter phase never reaches the entropy
        StateSpec spec{{1.0, 0.0}, {0.5, 0.0}, DeformedOscillator(0.5),
                       StateFamily::nc_squeezed};
        FockVector state = build_state(spec, 12);
        double s0 = entangle_and_measure(state, make_config(pi_half, 0.0)).linear_entropy;
        double s1 = entangle_and_measure(state, make_config(pi_half, 1.3)).linear_entropy;
        record("phase_invariance", std::abs(s0 - s1), 1e-12);
    }

    return checks;
}

}  // namespace ncoptics
