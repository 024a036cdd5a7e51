#pragma once

// Parameter-sweep engine: Cartesian (tau, alpha) grids evaluated through
// the full build -> mix -> reduce -> entropy pipeline, optionally in
// parallel, with rows buffered and emitted in grid order so identical
// configs produce identical bytes. Includes the named figure presets and
// the CSV / JSON-lines / metadata-sidecar writers.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <thread>

#include "ncoptics/serialization.hpp"

namespace ncoptics {

inline constexpr const char* artifact_version = "1.0.0";

enum class OutputFormat { csv, json };

struct SweepConfig {
    StateFamily family = StateFamily::nc_coherent;
    std::vector<cplx> alpha_grid;
    cplx zeta{0.0, 0.0};
    std::vector<double> tau_grid;
    double theta = 1.5707963267948966;  // pi/2: balanced splitter
    double phi = 0.0;
    std::optional<unsigned> levels;  // nullopt: auto-converge per point
    double tail_tol = 1e-8;
    std::string output_path;
    OutputFormat output_format = OutputFormat::csv;
    unsigned n_start = 8;
    unsigned n_max = 256;
};

// Inclusive [start, stop] grid with fixed step, each point computed as
// start + i*step (no accumulation drift).
inline std::vector<double> linspace_grid(double start, double stop, double step) {
    if (step <= 0.0) throw std::invalid_argument("grid step must be positive");
    std::vector<double> g;
    for (unsigned i = 0;; ++i) {
        double v = start + static_cast<double>(i) * step;
        if (v > stop + step * 1e-9) break;
        g.push_back(v);
    }
    return g;
}

inline void validate(const SweepConfig& c) {
    if (c.alpha_grid.empty() || c.tau_grid.empty())
        throw std::invalid_argument("sweep grids must be non-empty");
    if (c.levels && *c.levels < 8)
        throw std::invalid_argument("explicit levels must be >= 8");
    if (is_coherent(c.family) && c.zeta != cplx{0.0, 0.0})
        throw std::invalid_argument("coherent families require zeta = 0");
    if (c.family == StateFamily::nc_squeezed && c.zeta == cplx{0.0, 0.0})
        throw std::invalid_argument("nc-squeezed requires zeta != 0 (use nc-coherent)");
    for (double tau : c.tau_grid)
        if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
    if (c.output_format == OutputFormat::csv)
        for (const cplx& a : c.alpha_grid)
            if (a.imag() != 0.0)
                throw std::invalid_argument(
                    "csv output has a single real alpha column; use json for complex alpha");
}

// One pipeline evaluation. With explicit levels the state is built exactly
// there and `converged` reports whether the tail estimate met tail_tol; in
// auto mode the truncation is doubled until it does (or n_max is hit).
inline EntropyResult evaluate_point(const StateSpec& spec, double theta, double phi,
                                    std::optional<unsigned> levels, double tail_tol,
                                    unsigned n_start, unsigned n_max,
                                    bool with_von_neumann = false) {
    FockVector state;
    bool converged = false;
    if (levels) {
        state = build_state(spec, *levels);
        converged = state.tail_mass <= tail_tol;
    } else {
        ConvergedState cs = converge_truncation(spec, tail_tol, n_start, n_max);
        state = std::move(cs.state);
        converged = cs.converged;
    }

    EntanglementMeasures m =
        entangle_and_measure(state, make_config(theta, phi), with_von_neumann);

    EntropyResult r;
    r.alpha = spec.alpha;
    r.zeta = spec.zeta;
    r.tau = spec.model.tau;
    r.theta = theta;
    r.phi = phi;
    r.levels = state.truncation;
    r.linear_entropy = m.linear_entropy;
    r.purity = m.purity;
    r.von_neumann = m.von_neumann;
    r.converged = converged;
    r.tail_mass = state.tail_mass;
    return r;
}

inline unsigned resolve_workers(unsigned flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("NCOPTICS_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Tau-major, then alpha: row index = tau_index * |alpha_grid| + alpha_index.
// Points are claimed by an atomic counter and stored by index, so the
// emitted order never depends on scheduling.
inline std::vector<EntropyResult> run_sweep(const SweepConfig& config, unsigned workers = 0) {
    validate(config);
    const size_t na = config.alpha_grid.size();
    const size_t total = config.tau_grid.size() * na;
    std::vector<EntropyResult> rows(total);

    bool with_vn = config.output_format == OutputFormat::json;
    auto compute = [&](size_t idx) {
        StateSpec spec;
        spec.family = config.family;
        spec.alpha = config.alpha_grid[idx % na];
        spec.zeta = config.zeta;
        spec.model = DeformedOscillator(config.tau_grid[idx / na]);
        rows[idx] = evaluate_point(spec, config.theta, config.phi, config.levels,
                                   config.tail_tol, config.n_start, config.n_max, with_vn);
    };

    unsigned n_workers = std::min<size_t>(resolve_workers(workers), total);
    if (n_workers <= 1) {
        for (size_t i = 0; i < total; ++i) compute(i);
        return rows;
    }

    std::atomic<size_t> next{0};
    auto drain = [&]() {
        for (size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) compute(i);
    };
    std::vector<std::future<void>> pool;
    for (unsigned w = 0; w < n_workers; ++w)
        pool.push_back(std::async(std::launch::async, drain));
    for (auto& f : pool) f.get();  // propagates the first worker exception
    return rows;
}

inline void write_csv(const std::vector<EntropyResult>& rows, std::ostream& os) {
    os << "alpha,tau,zeta_re,zeta_im,theta,levels,linear_entropy,purity,converged,tail_mass\n";
    for (const EntropyResult& r : rows) {
        os << format_double(r.alpha.real()) << ',' << format_double(r.tau) << ','
           << format_double(r.zeta.real()) << ',' << format_double(r.zeta.imag()) << ','
           << format_double(r.theta) << ',' << r.levels << ','
           << format_double(r.linear_entropy) << ',' << format_double(r.purity) << ','
           << (r.converged ? "true" : "false") << ',' << format_double(r.tail_mass) << '\n';
    }
}

inline void write_json_lines(const std::vector<EntropyResult>& rows, std::ostream& os) {
    for (const EntropyResult& r : rows) os << entropy_to_json(r).dump() << '\n';
}

inline json config_to_json(const SweepConfig& c) {
    json alpha = json::array();
    for (const cplx& a : c.alpha_grid) alpha.push_back({a.real(), a.imag()});
    json j{{"family", family_name(c.family)},
           {"alpha", std::move(alpha)},
           {"zeta", {c.zeta.real(), c.zeta.imag()}},
           {"tau", c.tau_grid},
           {"theta", c.theta},
           {"phi", c.phi},
           {"tail_tol", c.tail_tol},
           {"output", c.output_path},
           {"format", c.output_format == OutputFormat::csv ? "csv" : "json"},
           {"n_start", c.n_start},
           {"n_max", c.n_max}};
    if (c.levels)
        j["levels"] = *c.levels;
    else
        j["levels"] = "auto";
    return j;
}

// Writes the data file plus the `<output>.meta.json` sidecar recording the
// fully resolved config.
inline void write_output(const SweepConfig& config, const std::vector<EntropyResult>& rows) {
    std::ofstream os(config.output_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + config.output_path);
    if (config.output_format == OutputFormat::csv)
        write_csv(rows, os);
    else
        write_json_lines(rows, os);
    os.close();

    json meta{{"version", artifact_version},
              {"config", config_to_json(config)},
              {"rows", rows.size()}};
    std::ofstream ms(config.output_path + ".meta.json", std::ios::binary);
    if (!ms) throw std::runtime_error("cannot open sidecar: " + config.output_path + ".meta.json");
    ms << meta.dump(2) << '\n';
}

// Named presets reproducing the bundled parameter studies. The overlay
// presets (fig2a/fig2b) compare the deformed squeezed state against the
// ordinary one at the same zeta, merged on the alpha column.
struct FigurePreset {
    std::string name;
    SweepConfig config;
    bool overlay_ho = false;
};

inline FigurePreset figure_preset(const std::string& name) {
    auto real_grid = [](double start, double stop, double step) {
        std::vector<cplx> g;
        for (double v : linspace_grid(start, stop, step)) g.emplace_back(v, 0.0);
        return g;
    };

    FigurePreset p;
    p.name = name;
    SweepConfig& c = p.config;
    c.output_path = name + ".csv";
    if (name == "fig1a") {
        c.family = StateFamily::nc_coherent;
        c.levels = 20;
        c.tau_grid = {0.0, 0.1, 0.2, 0.3, 0.5};
        c.alpha_grid = real_grid(0.0, 3.0, 0.05);
    } else if (name == "fig1b") {
        c.family = StateFamily::nc_coherent;
        c.levels = 20;
        c.tau_grid = linspace_grid(0.0, 1.0, 0.05);
        c.alpha_grid = real_grid(0.0, 3.0, 0.1);
    } else if (name == "fig2a" || name == "fig2b") {
        c.family = StateFamily::nc_squeezed;
        c.levels = 40;
        c.zeta = (name == "fig2a") ? cplx{0.75, 0.0} : cplx{0.25, 0.0};
        c.tau_grid = {0.5};
        c.alpha_grid = real_grid(0.0, 3.0, 0.05);
        p.overlay_ho = true;
    } else if (name == "fig3") {
        c.family = StateFamily::nc_squeezed;
        c.levels = 10;
        c.zeta = {0.5, 0.0};
        c.tau_grid = linspace_grid(0.0, 1.0, 0.05);
        c.alpha_grid = real_grid(0.0, 3.0, 0.1);
    } else {
        throw std::invalid_argument("unknown figure preset: " + name +
                                    " (expected fig1a, fig1b, fig2a, fig2b, fig3)");
    }
    return p;
}

// Aligned-column overlay table for the fig2 presets: alpha, S for the
// deformed squeezed state, S for the ordinary squeezed state.
inline void write_overlay_csv(const std::vector<EntropyResult>& nc,
                              const std::vector<EntropyResult>& ho, std::ostream& os) {
    if (nc.size() != ho.size())
        throw std::runtime_error("overlay rows misaligned");
    os << "alpha,S_nc,S_ho\n";
    for (size_t i = 0; i < nc.size(); ++i)
        os << format_double(nc[i].alpha.real()) << ',' << format_double(nc[i].linear_entropy)
           << ',' << format_double(ho[i].linear_entropy) << '\n';
}

// Runs a preset to its output file (+ sidecar). Returns true when every
// row converged.
inline bool run_figure(const FigurePreset& preset, unsigned workers = 0) {
    if (!preset.overlay_ho) {
        std::vector<EntropyResult> rows = run_sweep(preset.config, workers);
        write_output(preset.config, rows);
        bool all = true;
        for (const EntropyResult& r : rows) all = all && r.converged;
        return all;
    }

    std::vector<EntropyResult> nc = run_sweep(preset.config, workers);
    SweepConfig ho_config = preset.config;
    ho_config.family = StateFamily::ho_squeezed;
    ho_config.tau_grid = {0.0};
    std::vector<EntropyResult> ho = run_sweep(ho_config, workers);

    std::ofstream os(preset.config.output_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + preset.config.output_path);
    write_overlay_csv(nc, ho, os);
    os.close();

    json meta{{"version", artifact_version},
              {"config", config_to_json(preset.config)},
              {"overlay", config_to_json(ho_config)},
              {"rows", nc.size()}};
    std::ofstream ms(preset.config.output_path + ".meta.json", std::ios::binary);
    if (!ms)
        throw std::runtime_error("cannot open sidecar: " + preset.config.output_path +
                                 ".meta.json");
    ms << meta.dump(2) << '\n';

    bool all = true;
    for (const EntropyResult& r : nc) all = all && r.converged;
    for (const EntropyResult& r : ho) all = all && r.converged;
    return all;
}

inline SweepConfig sweep_config_from_json(const json& j) {
    SweepConfig c;
    if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("alpha")) {
        c.alpha_grid.clear();
        const json& a = j.at("alpha");
        if (a.is_object()) {
            for (double v : linspace_grid(a.at("start").get<double>(), a.at("stop").get<double>(),
                                          a.at("step").get<double>()))
                c.alpha_grid.emplace_back(v, 0.0);
        } else {
            for (const json& e : a) {
                if (e.is_array())
                    c.alpha_grid.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
                else
                    c.alpha_grid.emplace_back(e.get<double>(), 0.0);
            }
        }
    }
    if (j.contains("tau")) {
        c.tau_grid.clear();
        const json& t = j.at("tau");
        if (t.is_object())
            c.tau_grid = linspace_grid(t.at("start").get<double>(), t.at("stop").get<double>(),
                                       t.at("step").get<double>());
        else if (t.is_array())
            c.tau_grid = t.get<std::vector<double>>();
        else
            c.tau_grid = {t.get<double>()};
    }
    if (j.contains("zeta")) {
        const json& z = j.at("zeta");
        if (z.is_array())
            c.zeta = {z.at(0).get<double>(), z.at(1).get<double>()};
        else
            c.zeta = {z.get<double>(), 0.0};
    }
    if (j.contains("theta")) c.theta = j.at("theta").get<double>();
    if (j.contains("phi")) c.phi = j.at("phi").get<double>();
    if (j.contains("levels")) {
        const json& l = j.at("levels");
        if (l.is_string() && l.get<std::string>() == "auto")
            c.levels.reset();
        else
            c.levels = l.get<unsigned>();
    }
    if (j.contains("tail_tol")) c.tail_tol = j.at("tail_tol").get<double>();
    if (j.contains("output")) c.output_path = j.at("output").get<std::string>();
    if (j.contains("format")) {
        std::string f = j.at("format").get<std::string>();
        if (f == "csv")
            c.output_format = OutputFormat::csv;
        else if (f == "json")
            c.output_format = OutputFormat::json;
        else
            throw std::invalid_argument("unknown output format: " + f);
    }
    if (j.contains("n_start")) c.n_start = j.at("n_start").get<unsigned>();
    if (j.contains("n_max")) c.n_max = j.at("n_max").get<unsigned>();
    return c;
}

}  // namespace ncoptics
