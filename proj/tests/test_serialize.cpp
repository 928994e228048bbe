#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "phaseopt/serialize.hpp"

using namespace phaseopt;
using io::Json;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("phaseopt_test_" + name);
}

}  // namespace

TEST_CASE("text file round-trip") {
    const std::filesystem::path path = temp_file("roundtrip.txt");
    const std::string payload = "line one\nline two\n";
    io::write_text_file(path.string(), payload);
    CHECK(io::read_text_file(path.string()) == payload);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(io::read_text_file(path.string()), std::invalid_argument);
    CHECK_THROWS_AS(io::write_text_file("/nonexistent-dir/x/y.txt", "z"), std::invalid_argument);
}

TEST_CASE("JSON parsing rejects malformed input") {
    CHECK_THROWS_AS(io::parse_json("{\"a\": ", "test"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_json("not json", "test"), std::invalid_argument);
    const Json j = io::parse_json("{\"a\": 3}", "test");
    CHECK(j["a"].get<int>() == 3);
}

TEST_CASE("doubles survive the text format exactly") {
    for (double v : {0.0, 1.0 / 3.0, -2.5e-17, 0.12345678901234567, 6.0221408e23, -0.75}) {
        const std::string s = io::format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("complex numbers round-trip as [re, im] pairs") {
    const cd z(0.1, -2.0 / 3.0);
    CHECK(io::complex_from_json(io::complex_to_json(z), "test") == z);
    CHECK_THROWS_AS(io::complex_from_json(Json::array({1.0}), "test"), std::invalid_argument);
    CHECK_THROWS_AS(io::complex_from_json(Json("x"), "test"), std::invalid_argument);
}

TEST_CASE("probe states round-trip through JSON") {
    rng::Engine eng = rng::make_engine(55);
    const ProbeState state(rng::random_unit_vector(eng, 6));
    const ProbeState back = io::state_from_json(io::state_to_json(state));
    REQUIRE(back.amplitudes.size() == state.amplitudes.size());
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i)
        CHECK(back.amplitudes[i] == state.amplitudes[i]);

    CHECK_THROWS_AS(io::state_from_json(Json{{"amplitudes", "x"}}), std::invalid_argument);
    CHECK_THROWS_AS(io::state_from_json(Json{{"other", 1}}), std::invalid_argument);
    // norm validation still applies on the way in
    CHECK_THROWS_AS(io::state_from_json(Json{{"amplitudes", Json::array({Json::array({2.0, 0.0})})}}),
                    std::invalid_argument);
}

TEST_CASE("coefficient tables round-trip with their source tag") {
    SECTION("closed-form source") {
        const FourierCoefficients fc = fourier_coefficients(CostSpec::fidelity(), 5);
        const FourierCoefficients back = io::coeffs_from_json(io::coeffs_to_json(fc));
        CHECK(back.max_lag == fc.max_lag);
        CHECK(back.source == CoeffSource::Analytic);
        for (int k = 0; k <= 5; ++k) CHECK(back.coeffs[k] == fc.coeffs[k]);
    }
    SECTION("quadrature source keeps its point count") {
        const CostSpec cost =
            CostSpec::custom([](double phi) { return std::sin(phi / 2) * std::sin(phi / 2); }, 256);
        const FourierCoefficients fc = fourier_coefficients(cost, 4);
        REQUIRE(fc.source == CoeffSource::Quadrature);
        const FourierCoefficients back = io::coeffs_from_json(io::coeffs_to_json(fc));
        CHECK(back.source == CoeffSource::Quadrature);
        CHECK(back.quadrature_points == fc.quadrature_points);
    }
    SECTION("length mismatch and unknown source are rejected") {
        Json j{{"max_lag", 2}, {"coeffs", Json::array({Json::array({1.0, 0.0})})}};
        CHECK_THROWS_AS(io::coeffs_from_json(j), std::invalid_argument);
        Json j2 = io::coeffs_to_json(fourier_coefficients(CostSpec::fidelity(), 2));
        j2["source"] = "oracle";
        CHECK_THROWS_AS(io::coeffs_from_json(j2), std::invalid_argument);
    }
}

TEST_CASE("circuits round-trip through JSON") {
    const GeneralCircuitSpec spec = random_circuit(4, 5, 3, 12);
    const GeneralCircuitSpec back = io::circuit_from_json(io::circuit_to_json(spec));
    CHECK(back.n_qubits == spec.n_qubits);
    REQUIRE(back.ops.size() == spec.ops.size());
    const CircuitRunResult a = run_general_circuit(spec, 1.37);
    const CircuitRunResult b = run_general_circuit(back, 1.37);
    REQUIRE(a.state.amplitudes.size() == b.state.amplitudes.size());
    for (std::size_t i = 0; i < a.state.amplitudes.size(); ++i)
        CHECK(a.state.amplitudes[i] == b.state.amplitudes[i]);
}

TEST_CASE("circuit decoding validates structure and unitarity") {
    CHECK_THROWS_AS(io::circuit_from_json(Json{{"n_qubits", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(
        io::circuit_from_json(io::parse_json(
            R"({"n_qubits": 2, "ops": [{"type": "swap"}]})", "t")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        io::circuit_from_json(io::parse_json(
            R"({"n_qubits": 2, "ops": [{"type": "oracle"}]})", "t")),
        std::invalid_argument);
    // non-unitary matrix is caught by the circuit validator
    CHECK_THROWS_AS(
        io::circuit_from_json(io::parse_json(
            R"({"n_qubits": 1, "ops": [{"type": "unitary", "wires": [0],
                "matrix": [[[2,0],[0,0]],[[0,0],[2,0]]]}]})",
            "t")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        io::circuit_from_json(io::parse_json(
            R"({"n_qubits": 1, "ops": [{"type": "unitary", "wires": [0],
                "matrix": [[[1,0],[0,0]]]}]})",
            "t")),
        std::invalid_argument);
}

TEST_CASE("custom costs decode from uniform-grid samples") {
    SECTION("interpolant reproduces the sampled values") {
        const int n = 16;
        Json samples = Json::array();
        auto fn = [](double phi) { return 0.3 + 0.2 * std::cos(phi) - 0.1 * std::sin(2 * phi); };
        for (int t = 0; t < n; ++t) {
            const double phi = two_pi * t / n;
            samples.push_back(Json::array({phi, fn(phi)}));
        }
        const CostSpec cost = io::custom_cost_from_json(Json{{"samples", samples}});
        REQUIRE(cost.kind == CostKind::Custom);
        CHECK_FALSE(cost.is_even());
        for (int t = 0; t < n; ++t)
            CHECK(std::abs(cost.evaluate(two_pi * t / n) - fn(two_pi * t / n)) < 1e-12);
        // bandlimited input, so the interpolant matches off grid too
        CHECK(std::abs(cost.evaluate(0.4) - fn(0.4)) < 1e-12);
    }
    SECTION("even symmetry tag is honored") {
        Json samples = Json::array();
        for (int t = 0; t < 8; ++t)
            samples.push_back(Json::array({two_pi * t / 8, std::cos(two_pi * t / 8)}));
        const CostSpec cost =
            io::custom_cost_from_json(Json{{"samples", samples}, {"symmetry", "even"}});
        CHECK(cost.is_even());
        CHECK_THROWS_AS(
            io::custom_cost_from_json(Json{{"samples", samples}, {"symmetry", "odd"}}),
            std::invalid_argument);
    }
    SECTION("off-grid phases are rejected") {
        Json samples = Json::array();
        samples.push_back(Json::array({0.0, 1.0}));
        samples.push_back(Json::array({3.0, 1.0}));
        CHECK_THROWS_AS(io::custom_cost_from_json(Json{{"samples", samples}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(io::custom_cost_from_json(Json{{"samples", Json::array()}}),
                        std::invalid_argument);
    }
}

TEST_CASE("state source names round-trip") {
    for (StateSource s :
         {StateSource::Sine, StateSource::Uniform, StateSource::Optimal, StateSource::Imported})
        CHECK(io::state_source_from_string(io::state_source_to_string(s)) == s);
    CHECK_THROWS_AS(io::state_source_from_string("best"), std::invalid_argument);
}

TEST_CASE("report serialization carries every column") {
    CostReport report;
    report.analytic_cost = 0.125;
    report.semi_analytic_cost = 0.1250000001;
    report.monte_carlo_cost = 0.126;
    report.monte_carlo_stderr = 0.0005;
    report.oracle_calls_per_trial = 3;

    const Json j = io::report_to_json(report, 3, StateSource::Uniform, 4);
    CHECK(j["N"].get<int>() == 3);
    CHECK(j["state_kind"].get<std::string>() == "uniform");
    CHECK(j["M"].get<int>() == 4);
    CHECK(j["analytic"].get<double>() == 0.125);
    CHECK(j["mc_stderr"].get<double>() == 0.0005);
    CHECK(j["mc_within_4_stderr"].get<bool>());

    const std::string row = io::report_csv_row(report, 3, StateSource::Uniform, 4);
    CHECK(row == "3,uniform,4,0.125,0.12500000010000001,0.126,0.00050000000000000001,3\n");
    CHECK(io::report_csv_header() == "N,state_kind,M,analytic,semi_analytic,mc_mean,mc_stderr,oracle_calls\n");
}

TEST_CASE("missing standard error leaves an empty CSV cell and a JSON null") {
    CostReport report;
    report.analytic_cost = 0.5;
    report.semi_analytic_cost = 0.5;
    report.monte_carlo_cost = 0.5;
    report.oracle_calls_per_trial = 1;
    const std::string row = io::report_csv_row(report, 1, StateSource::Sine, 2);
    CHECK(row == "1,sine,2,0.5,0.5,0.5,,1\n");
    const Json j = io::report_to_json(report, 1, StateSource::Sine, 2);
    CHECK(j["mc_stderr"].is_null());
}

TEST_CASE("sweep tables expose the rate columns") {
    std::vector<SweepRow> rows;
    rows.push_back(SweepRow{4, StateSource::Sine, 0.0625});
    rows.push_back(SweepRow{4, StateSource::Uniform, 0.1});

    SECTION("smooth costs leave the delta column empty") {
        const std::string csv = io::sweep_csv(rows, CostSpec::fidelity());
        CHECK(csv ==
              "N,state_kind,analytic,n_times_cost,n2_times_cost,delta_n_times_cost\n"
              "4,sine,0.0625,0.25,1,\n"
              "4,uniform,0.10000000000000001,0.40000000000000002,1.6000000000000001,\n");
    }
    SECTION("threshold costs fill the delta column") {
        const std::string csv = io::sweep_csv(rows, CostSpec::window(0.5));
        CHECK(csv ==
              "N,state_kind,analytic,n_times_cost,n2_times_cost,delta_n_times_cost\n"
              "4,sine,0.0625,0.25,1,0.125\n"
              "4,uniform,0.10000000000000001,0.40000000000000002,1.6000000000000001,"
              "0.20000000000000001\n");
    }
}
