// ncoptics command-line front end.
//
// Subcommands:
//   state    build one normalized state vector, print/save its JSON
//   entropy  run one state through the splitter pipeline, emit one record
//   sweep    evaluate a (tau, alpha) grid to CSV / JSON lines
//   figure   run a named preset (fig1a, fig1b, fig2a, fig2b, fig3)
//   selftest run the built-in fixed-point and oracle-equivalence checks
//
// Exit codes: 0 success, 2 flag/config error, 3 some results unconverged,
// 4 internal numeric failure.

#include <iostream>

#include <CLI11.hpp>

#include "ncoptics/selftest.hpp"

namespace {

using namespace ncoptics;

constexpr double kPiHalf = 1.5707963267948966;

cplx parse_complex(const std::string& text) {
    size_t comma = text.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(text), 0.0};
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse complex value '" + text +
                                    "' (expected re or re,im)");
    }
}

std::vector<double> parse_real_grid(const std::string& text) {
    try {
        if (text.find(':') != std::string::npos) {
            std::istringstream is(text);
            std::string a, b, s;
            std::getline(is, a, ':');
            std::getline(is, b, ':');
            std::getline(is, s);
            return linspace_grid(std::stod(a), std::stod(b), std::stod(s));
        }
        std::vector<double> g;
        std::istringstream is(text);
        std::string item;
        while (std::getline(is, item, ',')) g.push_back(std::stod(item));
        if (g.empty()) throw std::invalid_argument("empty grid");
        return g;
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("cannot parse grid '" + text +
                                    "' (expected start:stop:step or v1,v2,...): " + e.what());
    }
}

std::optional<unsigned> parse_levels(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        long v = std::stol(text);
        if (v < 0) throw std::invalid_argument("negative");
        return static_cast<unsigned>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse levels '" + text +
                                    "' (expected a nonnegative integer or 'auto')");
    }
}

void warn_tau(double tau) {
    if (auto note = tau_regime_note(tau)) std::cerr << "warning: " << *note << "\n";
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + out_path);
    os << text;
}

// Flags shared by `state` and `entropy`.
struct SpecFlags {
    std::string family = "nc-coherent";
    std::string alpha = "0";
    std::string zeta = "0";
    double tau = 0.0;
    std::string levels = "auto";
    double tail_tol = 1e-8;
    unsigned n_start = 8;
    unsigned n_max = 256;
    std::string out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family,
                        "state family: nc-coherent, nc-squeezed, ho-squeezed, ho-coherent");
        cmd->add_option("--alpha", alpha, "displacement parameter, re or re,im");
        cmd->add_option("--zeta", zeta, "squeezing parameter, re or re,im");
        cmd->add_option("--tau", tau, "deformation parameter (>= 0)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--levels", levels, "truncation level N, or 'auto' to converge");
        cmd->add_option("--tail-tol", tail_tol, "tail-mass tolerance for auto mode");
        cmd->add_option("--n-start", n_start, "auto mode: starting truncation");
        cmd->add_option("--n-max", n_max, "auto mode: truncation cap");
        cmd->add_option("--out", out, "output file (default: stdout)");
    }

    StateSpec spec() const {
        StateSpec s;
        s.family = parse_family(family);
        s.alpha = parse_complex(alpha);
        s.zeta = parse_complex(zeta);
        s.model = DeformedOscillator(tau);
        warn_tau(tau);
        return s;
    }
};

int cmd_state(const SpecFlags& f) {
    StateSpec spec = f.spec();
    std::optional<unsigned> levels = parse_levels(f.levels);
    FockVector state;
    bool converged = true;
    if (levels) {
        state = build_state(spec, *levels);
    } else {
        ConvergedState cs = converge_truncation(spec, f.tail_tol, f.n_start, f.n_max);
        state = std::move(cs.state);
        converged = cs.converged;
        if (!converged)
            std::cerr << "warning: tail mass " << state.tail_mass << " above tolerance at N="
                      << state.truncation << "\n";
    }
    emit(fock_to_json(spec, state).dump(2) + "\n", f.out);
    return converged ? 0 : 3;
}

int cmd_entropy(const SpecFlags& f, double theta, double phi, int fock_level,
                const std::string& format) {
    EntropyResult r;
    if (fock_level >= 0) {
        std::vector<cplx> raw(static_cast<size_t>(fock_level) + 1, cplx{0.0, 0.0});
        raw[static_cast<size_t>(fock_level)] = {1.0, 0.0};
        FockVector state = normalize(raw);
        EntanglementMeasures m = entangle_and_measure(state, make_config(theta, phi), true);
        r.theta = theta;
        r.phi = phi;
        r.levels = state.truncation;
        r.linear_entropy = m.linear_entropy;
        r.purity = m.purity;
        r.von_neumann = m.von_neumann;
    } else {
        StateSpec spec = f.spec();
        r = evaluate_point(spec, theta, phi, parse_levels(f.levels), f.tail_tol, f.n_start,
                           f.n_max, true);
    }

    if (format == "csv") {
        if (r.alpha.imag() != 0.0)
            throw std::invalid_argument("csv output requires real alpha; use --format json");
        std::ostringstream os;
        write_csv({r}, os);
        emit(os.str(), f.out);
    } else if (format == "json") {
        emit(entropy_to_json(r).dump(2) + "\n", f.out);
    } else {
        throw std::invalid_argument("unknown format: " + format + " (expected csv or json)");
    }
    return r.converged ? 0 : 3;
}

int run_rows_to_output(const SweepConfig& config, unsigned workers) {
    if (!config.tau_grid.empty())
        warn_tau(*std::max_element(config.tau_grid.begin(), config.tau_grid.end()));
    std::vector<EntropyResult> rows = run_sweep(config, workers);
    if (config.output_path.empty()) {
        std::ostringstream os;
        if (config.output_format == OutputFormat::csv)
            write_csv(rows, os);
        else
            write_json_lines(rows, os);
        std::cout << os.str();
    } else {
        write_output(config, rows);
    }
    for (const EntropyResult& r : rows)
        if (!r.converged) return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deformed-oscillator states through a beam splitter: "
                 "state construction, entanglement entropy, parameter sweeps"};
    app.set_version_flag("--version", ncoptics::artifact_version);
    app.require_subcommand(1);

    int rc = 0;

    // state
    auto* state_cmd = app.add_subcommand("state", "build one state vector, emit JSON");
    auto state_flags = std::make_shared<SpecFlags>();
    state_flags->attach(state_cmd);
    state_cmd->callback([state_flags, &rc] { rc = cmd_state(*state_flags); });

    // entropy
    auto* entropy_cmd =
        app.add_subcommand("entropy", "one state through the splitter, emit one record");
    auto entropy_flags = std::make_shared<SpecFlags>();
    entropy_flags->attach(entropy_cmd);
    auto theta = std::make_shared<double>(kPiHalf);
    auto phi = std::make_shared<double>(0.0);
    auto fock_level = std::make_shared<int>(-1);
    auto format = std::make_shared<std::string>("json");
    entropy_cmd->add_option("--theta", *theta, "beam-splitter angle (radians)");
    entropy_cmd->add_option("--phi", *phi, "beam-splitter phase (radians)");
    entropy_cmd->add_option("--fock", *fock_level,
                            "raw input mode: inject the Fock basis state |n>");
    entropy_cmd->add_option("--format", *format, "csv or json (default json)");
    entropy_cmd->callback([entropy_flags, theta, phi, fock_level, format, &rc] {
        rc = cmd_entropy(*entropy_flags, *theta, *phi, *fock_level, *format);
    });

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a (tau, alpha) grid");
    struct SweepFlags {
        std::string config_file, family, alphas, taus, zeta, levels, format, out;
        double theta = kPiHalf, phi = 0.0, tail_tol = 1e-8;
        unsigned n_start = 8, n_max = 256, workers = 0;
    };
    auto sf = std::make_shared<SweepFlags>();
    auto* opt_cfg = sweep_cmd->add_option("--config", sf->config_file,
                                          "JSON config file; flags override its values");
    auto* opt_family = sweep_cmd->add_option("--family", sf->family, "state family");
    auto* opt_alphas =
        sweep_cmd->add_option("--alpha", sf->alphas, "alpha grid: start:stop:step or v1,v2,...");
    auto* opt_taus =
        sweep_cmd->add_option("--tau", sf->taus, "tau grid: start:stop:step or v1,v2,...");
    auto* opt_zeta = sweep_cmd->add_option("--zeta", sf->zeta, "squeezing parameter, re or re,im");
    auto* opt_theta = sweep_cmd->add_option("--theta", sf->theta, "beam-splitter angle");
    auto* opt_phi = sweep_cmd->add_option("--phi", sf->phi, "beam-splitter phase");
    auto* opt_levels = sweep_cmd->add_option("--levels", sf->levels, "truncation N or 'auto'");
    auto* opt_tol = sweep_cmd->add_option("--tail-tol", sf->tail_tol, "tail-mass tolerance");
    auto* opt_nstart = sweep_cmd->add_option("--n-start", sf->n_start, "auto: start truncation");
    auto* opt_nmax = sweep_cmd->add_option("--n-max", sf->n_max, "auto: truncation cap");
    auto* opt_out = sweep_cmd->add_option("--out", sf->out, "output file (default: stdout)");
    auto* opt_format = sweep_cmd->add_option("--format", sf->format, "csv or json lines");
    sweep_cmd->add_option("--workers", sf->workers,
                          "parallel workers (default: NCOPTICS_WORKERS or hardware)");
    sweep_cmd->callback([=, &rc] {
        SweepConfig config;
        if (opt_cfg->count()) {
            std::ifstream is(sf->config_file);
            if (!is) throw std::invalid_argument("cannot read config file: " + sf->config_file);
            json j;
            try {
                is >> j;
            } catch (const json::exception& e) {
                throw std::invalid_argument("config file is not valid JSON: " +
                                            std::string(e.what()));
            }
            config = sweep_config_from_json(j);
        }
        if (opt_family->count()) config.family = parse_family(sf->family);
        if (opt_alphas->count()) {
            config.alpha_grid.clear();
            for (double v : parse_real_grid(sf->alphas)) config.alpha_grid.emplace_back(v, 0.0);
        }
        if (opt_taus->count()) config.tau_grid = parse_real_grid(sf->taus);
        if (opt_zeta->count()) config.zeta = parse_complex(sf->zeta);
        if (opt_theta->count()) config.theta = sf->theta;
        if (opt_phi->count()) config.phi = sf->phi;
        if (opt_levels->count()) config.levels = parse_levels(sf->levels);
        if (opt_tol->count()) config.tail_tol = sf->tail_tol;
        if (opt_nstart->count()) config.n_start = sf->n_start;
        if (opt_nmax->count()) config.n_max = sf->n_max;
        if (opt_out->count()) config.output_path = sf->out;
        if (opt_format->count()) {
            if (sf->format == "csv")
                config.output_format = OutputFormat::csv;
            else if (sf->format == "json")
                config.output_format = OutputFormat::json;
            else
                throw std::invalid_argument("unknown format: " + sf->format);
        }
        rc = run_rows_to_output(config, sf->workers);
    });

    // figure
    auto* figure_cmd = app.add_subcommand("figure", "run a named preset to CSV");
    auto fig_name = std::make_shared<std::string>();
    auto fig_out = std::make_shared<std::string>();
    auto fig_workers = std::make_shared<unsigned>(0);
    figure_cmd->add_option("name", *fig_name, "fig1a, fig1b, fig2a, fig2b, or fig3")->required();
    figure_cmd->add_option("--out", *fig_out, "output file (default: <name>.csv)");
    figure_cmd->add_option("--workers", *fig_workers, "parallel workers");
    figure_cmd->callback([fig_name, fig_out, fig_workers, &rc] {
        FigurePreset preset = figure_preset(*fig_name);
        if (!fig_out->empty()) preset.config.output_path = *fig_out;
        bool all = run_figure(preset, *fig_workers);
        std::cerr << "wrote " << preset.config.output_path << " and "
                  << preset.config.output_path << ".meta.json\n";
        rc = all ? 0 : 3;
    });

    // selftest
    auto* selftest_cmd =
        app.add_subcommand("selftest", "run built-in fixed-point and oracle checks");
    selftest_cmd->callback([&rc] {
        std::vector<CheckResult> checks = run_selftest();
        bool all = true;
        for (const CheckResult& c : checks) {
            all = all && c.pass;
            std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name
                      << "  deviation=" << format_double(c.observed)
                      << "  bound=" << format_double(c.bound) << "\n";
        }
        rc = all ? 0 : 4;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return rc;
}
