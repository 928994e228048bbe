#pragma once

#include <ctime>
#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include "phaseopt/common.hpp"
#include "phaseopt/cost_model.hpp"
#include "phaseopt/estimation.hpp"
#include "phaseopt/serialize.hpp"
#include "phaseopt/simulator.hpp"
#include "phaseopt/states.hpp"
#include "phaseopt/version.hpp"

namespace phaseopt::cli {

using io::Json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_validation = 4;
inline constexpr int exit_claim = 5;

inline constexpr double poly_residual_tol = 1e-9;

// ------------------------------- flag payloads --------------------------------

// Cost selection, self-contained: custom costs embed their sample table so a
// saved run can be replayed without the original file.
struct CostParams {
    std::string kind = "fidelity";  // fidelity | window | custom
    double delta = 0.0;
    Json custom_spec;  // the parsed custom-cost JSON object

    static CostParams parse_flag(const std::string& flag) {
        CostParams p;
        if (flag == "fidelity") {
            p.kind = "fidelity";
        } else if (flag.rfind("window:", 0) == 0) {
            p.kind = "window";
            try {
                p.delta = std::stod(flag.substr(7));
            } catch (const std::exception&) {
                throw std::invalid_argument("--cost window: malformed delta in " + flag);
            }
            if (!(p.delta > 0.0 && p.delta < pi))
                throw std::invalid_argument("--cost window: delta must lie in (0, pi)");
        } else if (flag.rfind("custom:", 0) == 0) {
            p.kind = "custom";
            p.custom_spec = io::parse_json(io::read_text_file(flag.substr(7)), "custom cost file");
            io::custom_cost_from_json(p.custom_spec);  // validate eagerly
        } else {
            throw std::invalid_argument(
                "--cost must be fidelity, window:<delta>, or custom:<file>, got " + flag);
        }
        return p;
    }

    CostSpec build() const {
        if (kind == "fidelity") return CostSpec::fidelity();
        if (kind == "window") return CostSpec::window(delta);
        if (kind == "custom") return io::custom_cost_from_json(custom_spec);
        throw std::invalid_argument("unknown cost kind: " + kind);
    }

    Json to_json() const {
        Json j{{"kind", kind}};
        if (kind == "window") j["delta"] = delta;
        if (kind == "custom") j["spec"] = custom_spec;
        return j;
    }

    static CostParams from_json(const Json& j) {
        CostParams p;
        p.kind = j.at("kind").get<std::string>();
        if (p.kind == "window") p.delta = j.at("delta").get<double>();
        if (p.kind == "custom") p.custom_spec = j.at("spec");
        p.build();
        return p;
    }
};

// Probe-state selection; imported states are embedded for replay.
struct StateParams {
    std::string kind = "sine";  // sine | uniform | optimal | imported
    Json amplitudes;            // imported: the probe-state JSON object

    static StateParams parse_flag(const std::string& flag) {
        StateParams p;
        if (flag == "sine" || flag == "uniform" || flag == "optimal") {
            p.kind = flag;
        } else if (flag.rfind("file:", 0) == 0) {
            p.kind = "imported";
            p.amplitudes = io::parse_json(io::read_text_file(flag.substr(5)), "probe state file");
            io::state_from_json(p.amplitudes);  // validate eagerly
        } else {
            throw std::invalid_argument(
                "--state must be sine, uniform, optimal, or file:<path>, got " + flag);
        }
        return p;
    }

    Json to_json() const {
        Json j{{"kind", kind}};
        if (kind == "imported") j["state"] = amplitudes;
        return j;
    }

    static StateParams from_json(const Json& j) {
        StateParams p;
        p.kind = j.at("kind").get<std::string>();
        if (p.kind == "imported") {
            p.amplitudes = j.at("state");
            io::state_from_json(p.amplitudes);
        }
        return p;
    }
};

// ------------------------------ command configs -------------------------------

struct OptimizeParams {
    CostParams cost;
    int n_oracles = 1;
    std::string out = "optimal";

    Json to_json() const { return Json{{"cost", cost.to_json()}, {"n", n_oracles}}; }
    static OptimizeParams from_json(const Json& j) {
        OptimizeParams p;
        p.cost = CostParams::from_json(j.at("cost"));
        p.n_oracles = j.at("n").get<int>();
        return p;
    }
};

struct SimulateParams {
    CostParams cost;
    StateParams state;
    int n_oracles = 1;
    int m_grid = 2;
    int trials = 10000;
    std::uint64_t seed = 1;
    int grid_points = 0;  // > 0 selects Grid phase sampling
    std::string out = "report";

    Json to_json() const {
        return Json{{"cost", cost.to_json()}, {"state", state.to_json()}, {"n", n_oracles},
                    {"m_grid", m_grid},       {"trials", trials},         {"seed", seed},
                    {"grid_points", grid_points}};
    }
    static SimulateParams from_json(const Json& j) {
        SimulateParams p;
        p.cost = CostParams::from_json(j.at("cost"));
        p.state = StateParams::from_json(j.at("state"));
        p.n_oracles = j.at("n").get<int>();
        p.m_grid = j.at("m_grid").get<int>();
        p.trials = j.at("trials").get<int>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.grid_points = j.at("grid_points").get<int>();
        return p;
    }

    ExperimentConfig to_config() const {
        ExperimentConfig config;
        config.cost = cost.build();
        config.n_oracles = n_oracles;
        config.m_grid = m_grid;
        config.trials = trials;
        config.seed = seed;
        if (grid_points > 0) {
            config.sampling = PhaseSampling::Grid;
            config.grid_points = grid_points;
        }
        config.source = io::state_source_from_string(state.kind);
        if (config.source == StateSource::Imported)
            config.imported = io::state_from_json(state.amplitudes);
        return config;
    }
};

struct SweepParams {
    CostParams cost;
    std::vector<std::string> states{"sine", "uniform"};
    std::vector<int> n_values;
    std::string out = "sweep";

    Json to_json() const {
        return Json{{"cost", cost.to_json()}, {"states", states}, {"n_values", n_values}};
    }
    static SweepParams from_json(const Json& j) {
        SweepParams p;
        p.cost = CostParams::from_json(j.at("cost"));
        p.states = j.at("states").get<std::vector<std::string>>();
        p.n_values = j.at("n_values").get<std::vector<int>>();
        return p;
    }
};

struct VerifyPolyParams {
    int circuits = 100;
    int max_oracles = 8;
    int max_qubits = 6;
    std::uint64_t seed = 3;
    Json circuit_spec;  // non-null: verify exactly this circuit instead
    std::string out = "verify";

    Json to_json() const {
        Json j{{"circuits", circuits},
               {"max_oracles", max_oracles},
               {"max_qubits", max_qubits},
               {"seed", seed}};
        if (!circuit_spec.is_null()) j["spec"] = circuit_spec;
        return j;
    }
    static VerifyPolyParams from_json(const Json& j) {
        VerifyPolyParams p;
        p.circuits = j.at("circuits").get<int>();
        p.max_oracles = j.at("max_oracles").get<int>();
        p.max_qubits = j.at("max_qubits").get<int>();
        p.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("spec")) p.circuit_spec = j.at("spec");
        return p;
    }
};

// --------------------------------- manifests ----------------------------------

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_manifest(const std::string& out, const std::string& command, const Json& config,
                           std::uint64_t master_seed) {
    const Json manifest{{"command", command},
                        {"config", config},
                        {"tool_version", version},
                        {"master_seed", master_seed},
                        {"timestamp", utc_timestamp()}};
    io::write_text_file(out + ".manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------- commands ----------------------------------

inline int run_optimize(const OptimizeParams& params, std::ostream& log) {
    if (params.n_oracles < 0) throw std::invalid_argument("optimize: --n must be >= 0");
    const CostSpec cost = params.cost.build();
    const int n = params.n_oracles;
    const FourierCoefficients fc = fourier_coefficients(cost, n);
    const ToeplitzCostMatrix matrix = toeplitz_from_coeffs(fc, n);
    const OptimizeResult result = optimize_state(matrix);

    Json report{{"minimal_cost", result.cost}, {"holevo_class", holevo_check(cost)}};
    log << "minimal expected cost " << io::format_double(result.cost) << "\n";

    if (params.cost.kind == "fidelity") {
        const ProbeState reference = sine_state(n);
        double dist2 = 0.0;
        for (int j = 0; j <= n; ++j)
            dist2 += std::norm(result.state.amplitudes[j] - reference.amplitudes[j]);
        const double closed_cost = std::sin(pi / (2.0 * (n + 2))) * std::sin(pi / (2.0 * (n + 2)));
        report["closed_form_state_distance"] = std::sqrt(dist2);
        report["closed_form_cost_residual"] = std::abs(result.cost - closed_cost);
        log << "closed-form comparison: state distance " << io::format_double(std::sqrt(dist2))
            << ", cost residual " << io::format_double(std::abs(result.cost - closed_cost)) << "\n";
    }
    if (params.cost.kind == "window") {
        const double uniform_cost = expected_cost(uniform_state(n), matrix);
        report["uniform_cost"] = uniform_cost;
        report["uniform_gap"] = uniform_cost - result.cost;
        log << "uniform-state cost " << io::format_double(uniform_cost) << ", gap "
            << io::format_double(uniform_cost - result.cost) << "\n";
    }

    io::write_text_file(params.out + ".json", io::state_to_json(result.state).dump(2) + "\n");
    io::write_text_file(params.out + ".report.json", report.dump(2) + "\n");
    write_manifest(params.out, "optimize", params.to_json(), 0);
    return exit_ok;
}

inline int run_simulate(const SimulateParams& params, std::ostream& log) {
    const ExperimentConfig config = params.to_config();
    config.validate();
    const CostReport report = run_experiment(config);

    const Json j = io::report_to_json(report, config.n_oracles, config.source, config.m_grid);
    io::write_text_file(params.out + ".json", j.dump(2) + "\n");
    io::write_text_file(params.out + ".csv",
                        io::report_csv_header() +
                            io::report_csv_row(report, config.n_oracles, config.source, config.m_grid));
    write_manifest(params.out, "simulate", params.to_json(), params.seed);

    log << "analytic " << io::format_double(report.analytic_cost) << "\n";
    log << "semi-analytic " << io::format_double(report.semi_analytic_cost) << " (|diff| "
        << io::format_double(std::abs(report.semi_analytic_cost - report.analytic_cost)) << ")\n";
    log << "monte carlo " << io::format_double(report.monte_carlo_cost);
    if (report.monte_carlo_stderr.has_value())
        log << " stderr " << io::format_double(*report.monte_carlo_stderr);
    log << "\n";
    if (!report.monte_carlo_within_4_stderr) {
        log << "validation failure: monte carlo deviates from analytic by more than 4 stderr\n";
        return exit_validation;
    }
    log << "triple agreement: monte carlo within 4 stderr of analytic\n";
    return exit_ok;
}

inline int run_sweep(const SweepParams& params, std::ostream& log) {
    const CostSpec cost = params.cost.build();
    std::vector<StateSource> sources;
    sources.reserve(params.states.size());
    for (const std::string& s : params.states) {
        const StateSource source = io::state_source_from_string(s);
        if (source == StateSource::Imported)
            throw std::invalid_argument("sweep: --states accepts sine, uniform, optimal");
        sources.push_back(source);
    }
    if (sources.empty()) throw std::invalid_argument("sweep: no states selected");
    const std::vector<SweepRow> rows = scaling_sweep(cost, sources, params.n_values);

    io::write_text_file(params.out + ".csv", io::sweep_csv(rows, cost));

    Json slopes = Json::object();
    for (StateSource source : sources) {
        std::vector<std::pair<double, double>> points;
        for (const SweepRow& row : rows)
            if (row.source == source && row.n_oracles > 0 && row.analytic_cost > 0.0)
                points.emplace_back(row.n_oracles, row.analytic_cost);
        if (points.size() >= 2) {
            const double slope = log_log_slope(points);
            slopes[io::state_source_to_string(source)] = slope;
            log << io::state_source_to_string(source) << " log-log slope "
                << io::format_double(slope) << "\n";
        }
    }
    io::write_text_file(params.out + ".slopes.json", slopes.dump(2) + "\n");
    write_manifest(params.out, "sweep", params.to_json(), 0);
    return exit_ok;
}

inline int run_verify_poly(const VerifyPolyParams& params, std::ostream& log) {
    if (params.circuit_spec.is_null()) {
        if (params.circuits < 1) throw std::invalid_argument("verify-poly: --circuits must be >= 1");
        if (params.max_oracles < 0)
            throw std::invalid_argument("verify-poly: --max-oracles must be >= 0");
        if (params.max_qubits < 1 || params.max_qubits > 12)
            throw std::invalid_argument("verify-poly: --max-qubits must lie in [1, 12]");
    }

    std::string csv = "index,n_qubits,n_oracles,max_residual\n";
    double worst = 0.0;
    int checked = 0;
    auto check = [&](int index, const GeneralCircuitSpec& spec) {
        FitOptions options;
        options.throw_on_violation = false;
        options.seed = rng::derive_seed(params.seed, 0x8000000000000000ULL | std::uint64_t(index));
        const PolynomialFit fit = fit_amplitude_polynomials(spec, options);
        csv += std::to_string(index) + "," + std::to_string(spec.n_qubits) + "," +
               std::to_string(spec.n_oracles()) + "," + io::format_double(fit.max_residual) + "\n";
        worst = std::max(worst, fit.max_residual);
        ++checked;
    };

    if (!params.circuit_spec.is_null()) {
        check(0, io::circuit_from_json(params.circuit_spec));
    } else {
        for (int i = 0; i < params.circuits; ++i) {
            rng::Engine meta = rng::make_engine(rng::derive_seed(params.seed, i));
            const int n_qubits = 1 + static_cast<int>(meta() % std::uint64_t(params.max_qubits));
            const int n_oracles = static_cast<int>(meta() % std::uint64_t(params.max_oracles + 1));
            const int n_unitaries = 2 + static_cast<int>(meta() % 10);
            check(i, random_circuit(n_qubits, n_unitaries, n_oracles, meta()));
        }
    }

    io::write_text_file(params.out + ".csv", csv);
    write_manifest(params.out, "verify-poly", params.to_json(), params.seed);
    log << "circuits " << checked << ", max residual " << io::format_double(worst) << "\n";
    if (worst > poly_residual_tol) {
        log << "claim falsified: residual above " << io::format_double(poly_residual_tol) << "\n";
        return exit_claim;
    }
    log << "all amplitudes reconstructed within " << io::format_double(poly_residual_tol) << "\n";
    return exit_ok;
}

// Replays a saved manifest; outputs land at the new base path and must match
// the original run byte for byte.
inline int run_rerun(const std::string& manifest_path, const std::string& out, std::ostream& log) {
    const Json manifest = io::parse_json(io::read_text_file(manifest_path), "manifest");
    if (!manifest.is_object() || !manifest.contains("command") || !manifest.contains("config"))
        throw std::invalid_argument("manifest: expected {\"command\", \"config\", ...}");
    const std::string command = manifest["command"].get<std::string>();
    const Json& config = manifest["config"];
    if (command == "optimize") {
        OptimizeParams p = OptimizeParams::from_json(config);
        p.out = out;
        return run_optimize(p, log);
    }
    if (command == "simulate") {
        SimulateParams p = SimulateParams::from_json(config);
        p.out = out;
        return run_simulate(p, log);
    }
    if (command == "sweep") {
        SweepParams p = SweepParams::from_json(config);
        p.out = out;
        return run_sweep(p, log);
    }
    if (command == "verify-poly") {
        VerifyPolyParams p = VerifyPolyParams::from_json(config);
        p.out = out;
        return run_verify_poly(p, log);
    }
    throw std::invalid_argument("manifest: unknown command " + command);
}

// ------------------------------- range parsing --------------------------------

// N-range syntax: "a:b" (step 1), "a:b:<step>", or "a:b:geom" (doubling from a,
// with b always included).
inline std::vector<int> parse_n_range(const std::string& range) {
    const auto fail = [&]() {
        throw std::invalid_argument("--n-range must be a:b, a:b:<step>, or a:b:geom, got " + range);
    };
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = range.find(':', start);
        parts.push_back(range.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) fail();
    int a = 0, b = 0;
    try {
        a = std::stoi(parts[0]);
        b = std::stoi(parts[1]);
    } catch (const std::exception&) {
        fail();
    }
    if (a < 0 || b < a) fail();

    std::vector<int> values;
    if (parts.size() == 3 && parts[2] == "geom") {
        if (a < 1) fail();
        for (int n = a; n < b; n *= 2) values.push_back(n);
        values.push_back(b);
    } else {
        int step = 1;
        if (parts.size() == 3) {
            try {
                step = std::stoi(parts[2]);
            } catch (const std::exception&) {
                fail();
            }
            if (step < 1) fail();
        }
        for (int n = a; n <= b; n += step) values.push_back(n);
    }
    return values;
}

}  // namespace phaseopt::cli
