#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phaseopt/common.hpp"
#include "phaseopt/cost_model.hpp"
#include "phaseopt/estimation.hpp"
#include "phaseopt/simulator.hpp"
#include "phaseopt/states.hpp"

namespace phaseopt::io {

using Json = nlohmann::json;

// ---------------------------------- files ------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << content;
    if (!out) throw std::invalid_argument("write failed: " + path);
}

inline Json parse_json(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("malformed JSON in " + what);
    return j;
}

// Round-trip-exact decimal rendering for CSV cells.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --------------------------------- complexes ----------------------------------

inline Json complex_to_json(const cd& z) { return Json::array({z.real(), z.imag()}); }

inline cd complex_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(what + ": complex entries must be [re, im]");
    return cd(j[0].get<double>(), j[1].get<double>());
}

// -------------------------------- probe states --------------------------------

inline Json state_to_json(const ProbeState& state) {
    Json amps = Json::array();
    for (const cd& a : state.amplitudes) amps.push_back(complex_to_json(a));
    return Json{{"amplitudes", std::move(amps)}};
}

inline ProbeState state_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("amplitudes") || !j["amplitudes"].is_array())
        throw std::invalid_argument("probe state: expected {\"amplitudes\": [[re, im], ...]}");
    std::vector<cd> amps;
    amps.reserve(j["amplitudes"].size());
    for (const Json& e : j["amplitudes"]) amps.push_back(complex_from_json(e, "probe state"));
    return ProbeState(std::move(amps));
}

// ----------------------------- Fourier coefficients ----------------------------

inline std::string coeff_source_to_string(const FourierCoefficients& fc) {
    if (fc.source == CoeffSource::Analytic) return "analytic";
    return "quadrature:" + std::to_string(fc.quadrature_points);
}

inline Json coeffs_to_json(const FourierCoefficients& fc) {
    Json coeffs = Json::array();
    for (const cd& c : fc.coeffs) coeffs.push_back(complex_to_json(c));
    return Json{{"max_lag", fc.max_lag}, {"coeffs", std::move(coeffs)}, {"source", coeff_source_to_string(fc)}};
}

inline FourierCoefficients coeffs_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("max_lag") || !j.contains("coeffs"))
        throw std::invalid_argument("coefficients: expected {\"max_lag\", \"coeffs\", \"source\"}");
    FourierCoefficients fc;
    fc.max_lag = j["max_lag"].get<int>();
    for (const Json& e : j["coeffs"]) fc.coeffs.push_back(complex_from_json(e, "coefficients"));
    if (fc.max_lag < 0 || fc.coeffs.size() != std::size_t(fc.max_lag) + 1)
        throw std::invalid_argument("coefficients: coeffs length must be max_lag + 1");
    const std::string source = j.value("source", std::string("analytic"));
    if (source == "analytic") {
        fc.source = CoeffSource::Analytic;
    } else if (source.rfind("quadrature:", 0) == 0) {
        fc.source = CoeffSource::Quadrature;
        fc.quadrature_points = std::stoi(source.substr(11));
    } else {
        throw std::invalid_argument("coefficients: unknown source " + source);
    }
    return fc;
}

// --------------------------------- circuits -----------------------------------

inline Json circuit_to_json(const GeneralCircuitSpec& spec) {
    Json ops = Json::array();
    for (const CircuitOp& op : spec.ops) {
        if (op.type == CircuitOp::Type::Oracle) {
            ops.push_back(Json{{"type", "oracle"}, {"wire", op.wire}});
            continue;
        }
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < op.matrix.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < op.matrix.cols(); ++c)
                row.push_back(complex_to_json(op.matrix(r, c)));
            rows.push_back(std::move(row));
        }
        ops.push_back(Json{{"type", "unitary"}, {"wires", op.wires}, {"matrix", std::move(rows)}});
    }
    return Json{{"n_qubits", spec.n_qubits}, {"ops", std::move(ops)}};
}

inline GeneralCircuitSpec circuit_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("n_qubits") || !j.contains("ops") || !j["ops"].is_array())
        throw std::invalid_argument("circuit: expected {\"n_qubits\", \"ops\"}");
    GeneralCircuitSpec spec;
    spec.n_qubits = j["n_qubits"].get<int>();
    for (const Json& e : j["ops"]) {
        const std::string type = e.value("type", std::string());
        if (type == "oracle") {
            if (!e.contains("wire")) throw std::invalid_argument("circuit: oracle op needs a wire");
            spec.ops.push_back(CircuitOp::oracle(e["wire"].get<int>()));
        } else if (type == "unitary") {
            if (!e.contains("wires") || !e.contains("matrix"))
                throw std::invalid_argument("circuit: unitary op needs wires and matrix");
            std::vector<int> wires = e["wires"].get<std::vector<int>>();
            const Json& rows = e["matrix"];
            const int d = static_cast<int>(rows.size());
            Eigen::MatrixXcd m(d, d);
            for (int r = 0; r < d; ++r) {
                if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != d)
                    throw std::invalid_argument("circuit: matrix must be square");
                for (int c = 0; c < d; ++c) m(r, c) = complex_from_json(rows[r][c], "circuit matrix");
            }
            spec.ops.push_back(CircuitOp::unitary(std::move(wires), std::move(m)));
        } else {
            throw std::invalid_argument("circuit: op type must be \"unitary\" or \"oracle\"");
        }
    }
    spec.validate();
    return spec;
}

// -------------------------------- custom costs ---------------------------------

// Custom cost exchange format: {"samples": [[phi, cost], ...], "symmetry":
// "even"|"general"} with phases on the uniform grid 2 pi t / n in order.
inline CostSpec custom_cost_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("samples") || !j["samples"].is_array() || j["samples"].empty())
        throw std::invalid_argument("custom cost: expected {\"samples\": [[phi, cost], ...]}");
    const Json& pairs = j["samples"];
    const int n = static_cast<int>(pairs.size());
    std::vector<double> values(n);
    for (int t = 0; t < n; ++t) {
        const Json& p = pairs[t];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw std::invalid_argument("custom cost: samples must be [phi, cost] pairs");
        const double phi = p[0].get<double>();
        if (std::abs(phi - two_pi * t / n) > 1e-9)
            throw std::invalid_argument("custom cost: phases must form the uniform grid 2*pi*t/n");
        values[t] = p[1].get<double>();
    }
    const std::string sym = j.value("symmetry", std::string("general"));
    if (sym != "even" && sym != "general")
        throw std::invalid_argument("custom cost: symmetry must be \"even\" or \"general\"");
    return trig_interpolated_cost(values, sym == "even" ? Symmetry::Even : Symmetry::General);
}

// --------------------------------- state kinds ---------------------------------

inline std::string state_source_to_string(StateSource s) {
    switch (s) {
        case StateSource::Sine: return "sine";
        case StateSource::Uniform: return "uniform";
        case StateSource::Optimal: return "optimal";
        case StateSource::Imported: return "imported";
    }
    throw std::invalid_argument("unknown state source");
}

inline StateSource state_source_from_string(const std::string& s) {
    if (s == "sine") return StateSource::Sine;
    if (s == "uniform") return StateSource::Uniform;
    if (s == "optimal") return StateSource::Optimal;
    if (s == "imported") return StateSource::Imported;
    throw std::invalid_argument("unknown state source: " + s);
}

// -------------------------------- cost reports ---------------------------------

inline Json report_to_json(const CostReport& report, int n_oracles, StateSource source, int m_grid) {
    Json j{{"N", n_oracles},
           {"state_kind", state_source_to_string(source)},
           {"M", m_grid},
           {"analytic", report.analytic_cost},
           {"semi_analytic", report.semi_analytic_cost},
           {"mc_mean", report.monte_carlo_cost},
           {"oracle_calls", report.oracle_calls_per_trial},
           {"mc_within_4_stderr", report.monte_carlo_within_4_stderr}};
    if (report.monte_carlo_stderr.has_value())
        j["mc_stderr"] = *report.monte_carlo_stderr;
    else
        j["mc_stderr"] = nullptr;
    return j;
}

inline std::string report_csv_header() {
    return "N,state_kind,M,analytic,semi_analytic,mc_mean,mc_stderr,oracle_calls\n";
}

inline std::string report_csv_row(const CostReport& report, int n_oracles, StateSource source,
                                  int m_grid) {
    std::string line = std::to_string(n_oracles) + "," + state_source_to_string(source) + "," +
                       std::to_string(m_grid) + "," + format_double(report.analytic_cost) + "," +
                       format_double(report.semi_analytic_cost) + "," +
                       format_double(report.monte_carlo_cost) + ",";
    if (report.monte_carlo_stderr.has_value()) line += format_double(*report.monte_carlo_stderr);
    line += "," + std::to_string(report.oracle_calls_per_trial) + "\n";
    return line;
}

// --------------------------------- sweep tables --------------------------------

// Sweep CSV: one analytic row per (N, state kind) with the rate-exposing ratio
// columns; the delta column is filled only for window costs.
inline std::string sweep_csv(const std::vector<SweepRow>& rows, const CostSpec& cost) {
    std::string out =
        "N,state_kind,analytic,n_times_cost,n2_times_cost,delta_n_times_cost\n";
    for (const SweepRow& row : rows) {
        const double n = row.n_oracles;
        out += std::to_string(row.n_oracles) + "," + state_source_to_string(row.source) + "," +
               format_double(row.analytic_cost) + "," + format_double(n * row.analytic_cost) + "," +
               format_double(n * n * row.analytic_cost) + ",";
        if (cost.kind == CostKind::Window)
            out += format_double(cost.delta * n * row.analytic_cost);
        out += "\n";
    }
    return out;
}

}  // namespace phaseopt::io
