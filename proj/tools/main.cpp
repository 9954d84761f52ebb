#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"

namespace {

// exit codes: 0 success, 1 verification failure, 2 usage/parameter error,
// 3 numerical failure
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

void add_model_options(CLI::App* sub, curvosc_cli::RunConfig& cfg) {
    sub->add_option("--lambda", cfg.lambda, "curvature-related nonlinearity parameter (nonzero)");
    sub->add_option("--alpha", cfg.alpha, "oscillator strength (> 0)");
    sub->add_option("--k", cfg.k, "isotonic strength (>= 0)");
    sub->add_option("--format", cfg.format, "output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "output file (default: stdout)");
    sub->add_option("--config", "JSON config file; explicit flags override its values");
}

void add_classical_options(CLI::App* sub, curvosc_cli::RunConfig& cfg) {
    sub->add_option("--J", cfg.J, "angular momentum (signed)");
    auto* e = sub->add_option("--E", cfg.E, "total energy");
    auto* c = sub->add_option("--C", cfg.C, "integration constant C = 2E - alpha^2/lambda");
    e->excludes(c);
    sub->add_option("--phi0", cfg.phi0, "phase constant of the radial closed form");
    sub->add_option("--K", cfg.K, "angular constant (the polar angle at t = 0)");
}

}  // namespace

int main(int argc, char** argv) {
    curvosc_cli::RunConfig cfg;
    try {
        // seed from --config before flag parsing so flags override
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") {
                cfg = curvosc_cli::load_config_file(argv[i + 1]);
                break;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    CLI::App app{"curved-plane oscillator with an isotonic term: exact solutions and oracles"};
    app.require_subcommand(1);

    auto* classify = app.add_subcommand("classify", "classify a classical setup into its regime");
    add_model_options(classify, cfg);
    add_classical_options(classify, cfg);

    auto* simulate =
        app.add_subcommand("simulate", "tabulate the closed-form trajectory and its ODE cross-check");
    add_model_options(simulate, cfg);
    add_classical_options(simulate, cfg);
    simulate->add_option("--t-start", cfg.t_start, "first output time");
    simulate->add_option("--t-end", cfg.t_end, "last output time");
    simulate->add_option("--samples", cfg.samples, "number of output rows");

    auto* spectrum = app.add_subcommand("spectrum", "enumerate bound levels sorted by energy");
    add_model_options(spectrum, cfg);
    spectrum->add_option("--max-m", cfg.max_m, "largest |m| to enumerate");
    spectrum->add_option("--max-nr", cfg.max_nr, "largest n_r to enumerate");

    auto* wavefunction =
        app.add_subcommand("wavefunction", "sample one normalized radial wavefunction");
    add_model_options(wavefunction, cfg);
    wavefunction->add_option("--m", cfg.m, "magnetic quantum number");
    wavefunction->add_option("--nr", cfg.nr, "radial quantum number");
    wavefunction->add_option("--samples", cfg.samples, "number of radial samples");

    auto* verify = app.add_subcommand(
        "verify", "run the full verification campaign (closed forms vs oracles)");
    add_model_options(verify, cfg);
    verify->add_option("--grid-points", cfg.grid_points, "radial oracle grid size");
    verify
        ->add_option("--perturb-energy", cfg.perturb_energy,
                     "test hook: offset the energy used by the residual checks")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    try {
        if (classify->parsed()) {
            cfg.command = "classify";
            return curvosc_cli::cmd_classify(cfg);
        }
        if (simulate->parsed()) {
            cfg.command = "simulate";
            return curvosc_cli::cmd_simulate(cfg);
        }
        if (spectrum->parsed()) {
            cfg.command = "spectrum";
            return curvosc_cli::cmd_spectrum(cfg);
        }
        if (wavefunction->parsed()) {
            cfg.command = "wavefunction";
            return curvosc_cli::cmd_wavefunction(cfg);
        }
        cfg.command = "verify";
        return curvosc_cli::cmd_verify(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const curvosc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return exit_numerical;
    }
}
