#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "phaseopt/cli.hpp"

namespace {

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string part = text.substr(start, comma - start);
        if (!part.empty()) parts.push_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace phaseopt;

    CLI::App app{
        "phaseopt: probe-state optimization and exact simulation of grid-readout "
        "phase estimation under 2pi-periodic cost functions"};
    app.set_version_flag("--version", phaseopt::version);
    app.require_subcommand(1);
    app.footer("Environment: PHASEOPT_THREADS caps internal parallelism (default: all cores).");

    std::string opt_cost, opt_out = "optimal";
    int opt_n = 0;
    CLI::App* optimize = app.add_subcommand("optimize", "Solve for the minimal-cost probe state");
    optimize->add_option("--cost", opt_cost, "fidelity | window:<delta> | custom:<file>")->required();
    optimize->add_option("--n", opt_n, "oracle budget N")->required();
    optimize->add_option("--out", opt_out, "output base path");

    std::string sim_cost, sim_state = "sine", sim_out = "report";
    int sim_n = 0, sim_m = 0, sim_trials = 10000, sim_grid = 0;
    std::uint64_t sim_seed = 1;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Analytic, semi-analytic, and Monte Carlo cost comparison");
    simulate->add_option("--cost", sim_cost, "fidelity | window:<delta> | custom:<file>")->required();
    simulate->add_option("--state", sim_state, "sine | uniform | optimal | file:<path>");
    simulate->add_option("--n", sim_n, "oracle budget N")->required();
    simulate->add_option("--m-grid", sim_m, "readout grid size M (must be >= N+1)")->required();
    simulate->add_option("--trials", sim_trials, "Monte Carlo trials");
    simulate->add_option("--seed", sim_seed, "master seed");
    simulate->add_option("--grid", sim_grid, "sample phases from a grid of this many points");
    simulate->add_option("--out", sim_out, "output base path");

    std::string sweep_cost, sweep_states = "sine,uniform", sweep_range, sweep_out = "sweep";
    CLI::App* sweep = app.add_subcommand("sweep", "Analytic cost scaling across oracle budgets");
    sweep->add_option("--cost", sweep_cost, "fidelity | window:<delta> | custom:<file>")->required();
    sweep->add_option("--states", sweep_states, "comma list of sine, uniform, optimal");
    sweep->add_option("--n-range", sweep_range, "a:b | a:b:<step> | a:b:geom")->required();
    sweep->add_option("--out", sweep_out, "output base path");

    std::string vp_spec, vp_out = "verify";
    int vp_circuits = 100, vp_max_oracles = 8, vp_max_qubits = 6;
    std::uint64_t vp_seed = 3;
    CLI::App* verify =
        app.add_subcommand("verify-poly", "Check degree-<=N amplitude polynomials on random circuits");
    verify->add_option("--circuits", vp_circuits, "number of random circuits");
    verify->add_option("--max-oracles", vp_max_oracles, "max oracle calls per circuit");
    verify->add_option("--max-qubits", vp_max_qubits, "max qubits per circuit (<= 12)");
    verify->add_option("--seed", vp_seed, "master seed");
    verify->add_option("--spec", vp_spec, "verify one circuit from this JSON file instead");
    verify->add_option("--out", vp_out, "output base path");

    std::string rr_manifest, rr_out;
    CLI::App* rerun = app.add_subcommand("rerun", "Replay a saved run manifest byte-identically");
    rerun->add_option("manifest", rr_manifest, "path to a <out>.manifest.json file")->required();
    rerun->add_option("--out", rr_out, "output base path for the replayed run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::exit_ok : cli::exit_usage;
    }

    try {
        if (*optimize) {
            cli::OptimizeParams p;
            p.cost = cli::CostParams::parse_flag(opt_cost);
            p.n_oracles = opt_n;
            p.out = opt_out;
            return cli::run_optimize(p, std::cout);
        }
        if (*simulate) {
            cli::SimulateParams p;
            p.cost = cli::CostParams::parse_flag(sim_cost);
            p.state = cli::StateParams::parse_flag(sim_state);
            p.n_oracles = sim_n;
            p.m_grid = sim_m;
            p.trials = sim_trials;
            p.seed = sim_seed;
            p.grid_points = sim_grid;
            p.out = sim_out;
            return cli::run_simulate(p, std::cout);
        }
        if (*sweep) {
            cli::SweepParams p;
            p.cost = cli::CostParams::parse_flag(sweep_cost);
            p.states = split_csv_list(sweep_states);
            p.n_values = cli::parse_n_range(sweep_range);
            p.out = sweep_out;
            return cli::run_sweep(p, std::cout);
        }
        if (*verify) {
            cli::VerifyPolyParams p;
            p.circuits = vp_circuits;
            p.max_oracles = vp_max_oracles;
            p.max_qubits = vp_max_qubits;
            p.seed = vp_seed;
            p.out = vp_out;
            if (!vp_spec.empty())
                p.circuit_spec = io::parse_json(io::read_text_file(vp_spec), "circuit spec file");
            return cli::run_verify_poly(p, std::cout);
        }
        if (*rerun) return cli::run_rerun(rr_manifest, rr_out, std::cout);
    } catch (const PolynomialClaimViolation& e) {
        std::cerr << "claim falsified: " << e.what() << "\n";
        return cli::exit_claim;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return cli::exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return cli::exit_numerical;
    }
    return cli::exit_usage;
}
