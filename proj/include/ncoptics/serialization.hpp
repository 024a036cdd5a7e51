#pragma once

// JSON forms of the domain types and helpers for float formatting. Floats
// in CSV/JSON-lines output use the shortest decimal that round-trips, so
// identical runs produce identical bytes on any platform with IEEE doubles.

#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "ncoptics/entanglement.hpp"

namespace ncoptics {

using nlohmann::json;

inline std::string family_name(StateFamily f) {
    switch (f) {
        case StateFamily::nc_coherent: return "nc-coherent";
        case StateFamily::nc_squeezed: return "nc-squeezed";
        case StateFamily::ho_squeezed: return "ho-squeezed";
        case StateFamily::ho_coherent: return "ho-coherent";
    }
    throw std::logic_error("family_name: unreachable");
}

inline StateFamily parse_family(std::string name) {
    for (char& c : name)
        if (c == '_') c = '-';
    if (name == "nc-coherent") return StateFamily::nc_coherent;
    if (name == "nc-squeezed") return StateFamily::nc_squeezed;
    if (name == "ho-squeezed") return StateFamily::ho_squeezed;
    if (name == "ho-coherent") return StateFamily::ho_coherent;
    throw std::invalid_argument("unknown state family: " + name +
                                " (expected nc-coherent, nc-squeezed, ho-squeezed, ho-coherent)");
}

// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline json fock_to_json(const StateSpec& spec, const FockVector& v) {
    json coeffs = json::array();
    for (const cplx& c : v.coeffs) coeffs.push_back({c.real(), c.imag()});
    return json{{"family", family_name(spec.family)},
                {"alpha", {spec.alpha.real(), spec.alpha.imag()}},
                {"zeta", {spec.zeta.real(), spec.zeta.imag()}},
                {"tau", spec.model.tau},
                {"truncation", v.truncation},
                {"coeffs", std::move(coeffs)},
                {"tail_mass", v.tail_mass}};
}

// Nonzero entries only, each as [q, m, re, im].
inline json amplitudes_to_json(const BipartiteAmplitudes& out) {
    json amps = json::array();
    for (unsigned q = 0; q <= out.truncation; ++q)
        for (unsigned m = 0; m + q <= out.truncation; ++m) {
            const cplx& a = out.at(q, m);
            if (a != cplx{0.0, 0.0}) amps.push_back({q, m, a.real(), a.imag()});
        }
    return json{{"truncation", out.truncation}, {"amps", std::move(amps)}};
}

inline json entropy_to_json(const EntropyResult& r) {
    return json{{"alpha_re", r.alpha.real()},
                {"alpha_im", r.alpha.imag()},
                {"zeta_re", r.zeta.real()},
                {"zeta_im", r.zeta.imag()},
                {"tau", r.tau},
                {"theta", r.theta},
                {"levels", r.levels},
                {"linear_entropy", r.linear_entropy},
                {"purity", r.purity},
                {"von_neumann", r.von_neumann},
                {"converged", r.converged},
                {"tail_mass", r.tail_mass}};
}

}  // namespace ncoptics
