// Copyright 2026 The Kraussim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "kraussim/circuit_json.hpp"
#include "kraussim/pauli.hpp"
#include "kraussim/qho.hpp"
#include "kraussim/statevector.hpp"

// Run orchestration: config ingestion, the classify -> derive -> truncate ->
// simulate -> validate pipeline, and deterministic file outputs.
//
// Error contract (mapped to process exit codes by the CLI): ConfigError = 2,
// UnsupportedSystemError = 3, ToleranceError = 4.

namespace kraussim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ToleranceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { kraus_matrix, kraus_circuit, expm, rk4 };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::kraus_matrix: return "kraus_matrix";
        case Method::kraus_circuit: return "kraus_circuit";
        case Method::expm: return "expm";
        default: return "rk4";
    }
}

inline Method method_from_string(const std::string& name) {
    if (name == "kraus_matrix") return Method::kraus_matrix;
    if (name == "kraus_circuit") return Method::kraus_circuit;
    if (name == "expm") return Method::expm;
    if (name == "rk4") return Method::rk4;
    throw ConfigError("unknown method: " + name);
}

enum class Preset { custom, dephasing, pauli_channel, damped_qho };

struct ObservableSpec {
    std::string name;
    Matrix matrix;
};

struct RunConfig {
    Preset preset = Preset::custom;
    std::optional<LindbladSystem> system;
    std::optional<QhoConfig> qho;
    std::vector<PauliString> pauli_strings;
    std::vector<double> pauli_gammas;

    Matrix rho0;
    std::optional<Vector> pure_state;  // set when the initial state is pure by construction
    std::vector<double> times;
    std::vector<ObservableSpec> observables;
    Method method = Method::expm;
    double epsilon = 1e-6;
    std::optional<int> max_order;
    int jobs = 1;
    std::uint64_t seed = 0;
    double rk4_dt = 1e-3;

    const LindbladSystem& sys() const { return *system; }
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix parse_matrix_checked(const Json& j, const char* what) {
    try {
        return matrix_from_json(j);
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

inline void parse_system(const Json& j, RunConfig& cfg) {
    if (!j.is_object()) throw ConfigError("system must be an object");
    if (j.contains("preset")) {
        const std::string preset = j.at("preset").get<std::string>();
        if (preset == "dephasing") {
            cfg.preset = Preset::dephasing;
            const double gamma = j.value("gamma", 1.0);
            if (gamma < 0.0) throw ConfigError("dephasing: gamma must be nonnegative");
            Matrix z(2, 2);
            z << 1, 0, 0, -1;
            cfg.system = LindbladSystem(Matrix::Zero(2, 2), {{z, gamma}});
        } else if (preset == "pauli_channel") {
            cfg.preset = Preset::pauli_channel;
            if (!j.contains("strings") || !j.contains("gammas")) {
                throw ConfigError("pauli_channel: needs strings and gammas");
            }
            for (const auto& s : j.at("strings")) {
                try {
                    cfg.pauli_strings.push_back(PauliString::from_string(s.get<std::string>()));
                } catch (const std::exception& e) {
                    throw ConfigError(std::string("pauli_channel: ") + e.what());
                }
            }
            cfg.pauli_gammas = j.at("gammas").get<std::vector<double>>();
            if (cfg.pauli_strings.empty() || cfg.pauli_strings.size() != cfg.pauli_gammas.size()) {
                throw ConfigError("pauli_channel: needs one gamma per string");
            }
            // Duplicate strings merge by summing rates before the channel
            // machinery, which requires distinct factors.
            std::vector<PauliString> merged;
            std::vector<double> merged_gamma;
            for (std::size_t i = 0; i < cfg.pauli_strings.size(); ++i) {
                bool found = false;
                for (std::size_t k = 0; k < merged.size(); ++k) {
                    if (merged[k].same_letters(cfg.pauli_strings[i])) {
                        merged_gamma[k] += cfg.pauli_gammas[i];
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    merged.push_back(cfg.pauli_strings[i]);
                    merged_gamma.push_back(cfg.pauli_gammas[i]);
                }
            }
            cfg.pauli_strings = std::move(merged);
            cfg.pauli_gammas = std::move(merged_gamma);
            try {
                cfg.system = pauli_channel_system(cfg.pauli_strings, cfg.pauli_gammas);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("pauli_channel: ") + e.what());
            }
        } else if (preset == "damped_qho") {
            cfg.preset = Preset::damped_qho;
            QhoConfig q;
            q.n_qubits = j.value("n_qubits", 1);
            q.omega = j.value("omega", 1.0);
            q.gamma = j.value("gamma", 0.0);
            if (q.n_qubits < 1 || q.n_qubits > 10) {
                throw ConfigError("damped_qho: n_qubits must be in [1, 10]");
            }
            if (q.omega <= 0.0) throw ConfigError("damped_qho: omega must be positive");
            if (q.gamma < 0.0) throw ConfigError("damped_qho: gamma must be nonnegative");
            cfg.qho = q;
            cfg.system = qho_system(q);
        } else {
            throw ConfigError("unknown preset: " + preset);
        }
        return;
    }
    if (!j.contains("custom")) throw ConfigError("system needs a preset or a custom block");
    const Json& c = j.at("custom");
    Matrix h = parse_matrix_checked(c.at("hamiltonian"), "custom hamiltonian");
    std::vector<LindbladTerm> terms;
    if (c.contains("lindblads")) {
        for (const auto& entry : c.at("lindblads")) {
            terms.push_back({parse_matrix_checked(entry.at("matrix"), "custom lindblad"),
                             entry.at("gamma").get<double>()});
        }
    }
    const double hbar = c.value("hbar", 1.0);
    try {
        cfg.system = LindbladSystem(std::move(h), std::move(terms), hbar);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("custom system: ") + e.what());
    }
}

inline void parse_initial_state(const Json& j, RunConfig& cfg) {
    const Eigen::Index d = cfg.sys().dim();
    if (j.contains("basis")) {
        const auto n = j.at("basis").get<Eigen::Index>();
        if (n < 0 || n >= d) throw ConfigError("initial_state: basis index out of range");
        Vector v = Vector::Zero(d);
        v(n) = 1.0;
        cfg.pure_state = v;
        cfg.rho0 = v * v.adjoint();
        return;
    }
    if (j.contains("pure")) {
        Vector v;
        try {
            v = vector_from_json(j.at("pure"));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("initial_state: ") + e.what());
        }
        if (v.size() != d) throw ConfigError("initial_state: pure vector dimension mismatch");
        const double norm = v.norm();
        if (std::abs(norm - 1.0) > 1e-9) {
            throw ConfigError("initial_state: pure vector must be normalized");
        }
        v /= norm;
        cfg.pure_state = v;
        cfg.rho0 = v * v.adjoint();
        return;
    }
    if (j.contains("density")) {
        Matrix rho = parse_matrix_checked(j.at("density"), "initial_state density");
        if (rho.rows() != d) throw ConfigError("initial_state: density dimension mismatch");
        if (!is_density_matrix(rho, 1e-9)) {
            throw ConfigError("initial_state: not a density matrix");
        }
        cfg.rho0 = std::move(rho);
        return;
    }
    throw ConfigError("initial_state needs basis, pure or density");
}

inline Matrix single_qubit_observable(char axis, int qubit, Eigen::Index d) {
    const int n = log2_exact(static_cast<std::size_t>(d));
    if (qubit < 0 || qubit >= n) throw ConfigError("observable qubit index out of range");
    Matrix sigma(2, 2);
    if (axis == 'X') sigma << 0, 1, 1, 0;
    else if (axis == 'Y') sigma << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    else sigma << 1, 0, 0, -1;
    Matrix out = Matrix::Identity(1, 1);
    for (int j = n - 1; j >= 0; --j) {
        out = kron(out, j == qubit ? sigma : identity(2));
    }
    return out;
}

inline void parse_observables(const Json& j, RunConfig& cfg) {
    const Eigen::Index d = cfg.sys().dim();
    if (!j.is_array() || j.empty()) throw ConfigError("observables must be a nonempty array");
    for (const auto& entry : j) {
        if (entry.is_string()) {
            const std::string name = entry.get<std::string>();
            if (name == "number") {
                cfg.observables.push_back({name, number_operator(d)});
                continue;
            }
            if (name.size() >= 2 && (name[0] == 'X' || name[0] == 'Y' || name[0] == 'Z')) {
                int qubit = 0;
                try {
                    qubit = std::stoi(name.substr(1));
                } catch (...) {
                    throw ConfigError("unknown observable: " + name);
                }
                if (next_pow2(d) != d) {
                    throw ConfigError("per-qubit observables need a power-of-two dimension");
                }
                cfg.observables.push_back({name, single_qubit_observable(name[0], qubit, d)});
                continue;
            }
            throw ConfigError("unknown observable: " + name);
        }
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("matrix")) {
            throw ConfigError("custom observables need name and matrix");
        }
        Matrix m = parse_matrix_checked(entry.at("matrix"), "observable");
        if (m.rows() != d || !is_hermitian(m, 1e-10)) {
            throw ConfigError("observable must be a Hermitian d x d matrix");
        }
        cfg.observables.push_back({entry.at("name").get<std::string>(), std::move(m)});
    }
}

}  // namespace detail

inline RunConfig load_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig cfg;
    if (!j.contains("system")) throw ConfigError("config needs a system block");
    detail::parse_system(j.at("system"), cfg);
    if (!j.contains("initial_state")) throw ConfigError("config needs an initial_state block");
    detail::parse_initial_state(j.at("initial_state"), cfg);
    if (!j.contains("times")) throw ConfigError("config needs a times array");
    cfg.times = j.at("times").get<std::vector<double>>();
    if (cfg.times.empty()) throw ConfigError("times must be nonempty");
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        if (cfg.times[i] < 0.0) throw ConfigError("times must be nonnegative");
        if (i > 0 && cfg.times[i] < cfg.times[i - 1]) {
            throw ConfigError("times must be sorted ascending");
        }
    }
    if (!j.contains("observables")) throw ConfigError("config needs an observables array");
    detail::parse_observables(j.at("observables"), cfg);
    if (j.contains("method")) cfg.method = method_from_string(j.at("method").get<std::string>());
    cfg.epsilon = j.value("epsilon", 1e-6);
    if (cfg.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
    if (j.contains("max_order")) {
        cfg.max_order = j.at("max_order").get<int>();
        if (*cfg.max_order < 0) throw ConfigError("max_order must be nonnegative");
    }
    cfg.jobs = j.value("jobs", 1);
    if (cfg.jobs < 1) throw ConfigError("jobs must be at least one");
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.rk4_dt = j.value("rk4_dt", 1e-3);
    if (cfg.rk4_dt <= 0.0) throw ConfigError("rk4_dt must be positive");
    return cfg;
}

inline RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    return load_config(j);
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct TrajectoryRow {
    double t = 0.0;
    std::vector<double> values;  // one per observable
    double bound = 0.0;          // series tail bound; zero for exact methods
};

struct Trajectory {
    std::vector<std::string> names;
    std::vector<TrajectoryRow> rows;
    std::string method;
};

namespace detail {

inline std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t";
    for (const auto& name : traj.names) out << "," << name;
    out << ",bound,method\n";
    for (const auto& row : traj.rows) {
        out << format_value(row.t);
        for (double v : row.values) out << "," << format_value(v);
        out << "," << format_value(row.bound) << "," << traj.method << "\n";
    }
}

inline CaseClassification require_series(const RunConfig& cfg) {
    auto cls = classify(cfg.sys());
    if (cls.label == CommutatorClass::unsupported) {
        std::ostringstream msg;
        msg << "system admits no closed-form series: " << cls.failing_condition
            << " (residuals: i=" << cls.residuals.h_damping_commutator
            << ", ii=" << cls.residuals.damping_pairwise << ", iii=" << cls.residuals.eigen_h
            << ", iv=" << cls.residuals.eigen_damping
            << ", fit=" << cls.residuals.superop_fit << ")";
        throw UnsupportedSystemError(msg.str());
    }
    return cls;
}

/// Truncation order for the generic series path at one time.
inline std::pair<int, double> series_order_and_bound(const RunConfig& cfg,
                                                     const CaseClassification& cls, double t) {
    if (cfg.max_order) {
        const auto bound = error_bound(cfg.sys(), cls, t, *cfg.max_order);
        return {*cfg.max_order, bound.value_or(std::numeric_limits<double>::infinity())};
    }
    const auto order = truncation_order(cfg.sys(), cls, t, cfg.epsilon);
    const auto bound = error_bound(cfg.sys(), cls, t, order.scanned);
    return {order.scanned, bound.value_or(0.0)};
}

/// Matrix-level Kraus family at one time; exact finite suites for the
/// channel presets, truncated generic series otherwise.
inline std::vector<Matrix> kraus_family(const RunConfig& cfg, const CaseClassification& cls,
                                        double t, int order) {
    std::vector<Matrix> out;
    if (cfg.preset == Preset::pauli_channel) {
        const auto probabilities = error_probabilities(cfg.pauli_gammas, t);
        for (std::size_t e = 0; e < probabilities.size(); ++e) {
            PauliString reduced = PauliString::identity_string(cfg.pauli_strings[0].n_qubits);
            for (std::size_t i = 0; i < cfg.pauli_strings.size(); ++i) {
                if ((e >> i) & 1U) reduced = pauli_multiply(reduced, cfg.pauli_strings[i]);
            }
            out.push_back(std::sqrt(probabilities[e]) * reduced.to_matrix());
        }
        return out;
    }
    if (cfg.preset == Preset::damped_qho) {
        for (int m = 0; m <= cfg.qho->max_occupied(); ++m) {
            out.push_back(qho_kraus_matrix(*cfg.qho, m, t));
        }
        return out;
    }
    const auto sched = scalar_schedule(cls);
    const auto terms = enumerate_terms(cfg.sys(), order);
    const Matrix prefactor =
        expm(((-imag_unit * t / cfg.sys().hbar()) * cfg.sys().effective_hamiltonian()).eval());
    for (const auto& term : terms) {
        out.push_back(term_weight(term, sched, t) * prefactor * term.base);
    }
    return out;
}

/// Circuit suite at one time, weights embedded.
inline std::vector<Circuit> circuit_family(const RunConfig& cfg, const CaseClassification& cls,
                                           double t, int order) {
    std::vector<Circuit> out;
    if (cfg.preset == Preset::pauli_channel) {
        for (auto& item : build_pauli_kraus(cfg.pauli_strings, cfg.pauli_gammas, t)) {
            out.push_back(std::move(item.circuit));
        }
        return out;
    }
    if (cfg.preset == Preset::damped_qho) {
        for (int m = 0; m <= cfg.qho->max_occupied(); ++m) {
            out.push_back(build_qho_circuit(*cfg.qho, m, t));
        }
        return out;
    }
    for (const auto& term : enumerate_terms(cfg.sys(), order)) {
        out.push_back(build_kraus_circuit(cfg.sys(), cls, term, t));
    }
    return out;
}

inline Matrix pad_observable(const Matrix& obs, Eigen::Index d_pad) {
    if (obs.rows() == d_pad) return obs;
    Matrix out = Matrix::Zero(d_pad, d_pad);
    out.topLeftCorner(obs.rows(), obs.cols()) = obs;
    return out;
}

/// Runs one circuit suite and recombines per-observable expectations in
/// suite order; parallel over circuits with a fixed reduction order.
inline std::vector<double> run_circuit_suite(const RunConfig& cfg,
                                             const std::vector<Circuit>& circuits) {
    const Eigen::Index d = cfg.sys().dim();
    std::optional<StateVector> purified;
    if (!cfg.pure_state) purified = prepare_purification(cfg.rho0);
    const int n_prep = purified ? purified->n_qubits - log2_exact(static_cast<std::size_t>(next_pow2(d)))
                                : 0;

    std::vector<std::vector<double>> per_circuit(circuits.size());
    parallel_for(circuits.size(), cfg.jobs, [&](std::size_t i) {
        const Circuit& circuit = circuits[i];
        const int n_sys = circuit.n_system;
        const Eigen::Index d_pad = Eigen::Index{1} << n_sys;
        StateVector input = StateVector::zero_state(circuit.total_qubits() + n_prep);
        if (cfg.pure_state) {
            input.amps[0] = 0.0;
            for (Eigen::Index s = 0; s < d; ++s) {
                input.amps[static_cast<std::size_t>(s)] = (*cfg.pure_state)(s);
            }
        } else {
            input.amps[0] = 0.0;
            const int shift = circuit.total_qubits();
            for (std::size_t p = 0; p < (std::size_t{1} << n_prep); ++p) {
                for (Eigen::Index s = 0; s < d_pad; ++s) {
                    input.amps[(p << shift) | static_cast<std::size_t>(s)] =
                        purified->amps[(p << n_sys) | static_cast<std::size_t>(s)];
                }
            }
        }
        Circuit extended = circuit;
        for (int p = 0; p < n_prep; ++p) {
            extended.ancillas.push_back({Ancilla::Role::prep, circuit.total_qubits() + p});
        }
        const StateVector out = run_circuit(extended, input);
        std::vector<double> values;
        values.reserve(cfg.observables.size());
        for (const auto& obs : cfg.observables) {
            const Matrix padded = pad_observable(obs.matrix, d_pad);
            values.push_back(circuit.weight * circuit.weight *
                             filtered_expectation(out, padded, n_sys, circuit.postselect_mask));
        }
        per_circuit[i] = std::move(values);
    });

    std::vector<double> totals(cfg.observables.size(), 0.0);
    for (const auto& values : per_circuit) {
        for (std::size_t k = 0; k < totals.size(); ++k) totals[k] += values[k];
    }
    return totals;
}

}  // namespace detail

struct RunArtifacts {
    Trajectory trajectory;
    std::optional<CaseClassification> classification;
    std::vector<Matrix> states;  // per time, for matrix-producing methods
    Json circuit_dump;           // populated for the circuit method
};

/// Executes the configured method over all times.  Writes nothing; see
/// run_config for the file-producing entry point.
inline RunArtifacts execute(const RunConfig& cfg) {
    RunArtifacts artifacts;
    artifacts.trajectory.method = to_string(cfg.method);
    for (const auto& obs : cfg.observables) artifacts.trajectory.names.push_back(obs.name);

    const bool needs_series =
        cfg.method == Method::kraus_matrix || cfg.method == Method::kraus_circuit;
    std::optional<CaseClassification> cls;
    if (needs_series) cls = detail::require_series(cfg);

    const bool exact_suite =
        cfg.preset == Preset::pauli_channel || cfg.preset == Preset::damped_qho;

    Matrix rk4_state = cfg.rho0;
    double rk4_time = 0.0;

    Json dump_times = Json::array();
    for (double t : cfg.times) {
        TrajectoryRow row;
        row.t = t;
        switch (cfg.method) {
            case Method::expm: {
                const Matrix rho = devectorize(exact_propagator(cfg.sys(), t) * vectorize(cfg.rho0));
                for (const auto& obs : cfg.observables) {
                    row.values.push_back((rho * obs.matrix).trace().real());
                }
                artifacts.states.push_back(rho);
                break;
            }
            case Method::rk4: {
                const double span = t - rk4_time;
                if (span > 0.0) {
                    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / cfg.rk4_dt)));
                    rk4_state = rk4_evolve(cfg.sys(), rk4_state, span, steps);
                    rk4_time = t;
                }
                for (const auto& obs : cfg.observables) {
                    row.values.push_back((rk4_state * obs.matrix).trace().real());
                }
                artifacts.states.push_back(rk4_state);
                break;
            }
            case Method::kraus_matrix: {
                int order = 0;
                if (!exact_suite) {
                    auto [chosen, bound] = detail::series_order_and_bound(cfg, *cls, t);
                    order = chosen;
                    row.bound = bound;
                }
                const auto family = detail::kraus_family(cfg, *cls, t, order);
                Matrix rho = Matrix::Zero(cfg.sys().dim(), cfg.sys().dim());
                for (const auto& k : family) rho += k * cfg.rho0 * k.adjoint();
                if (max_abs((rho - rho.adjoint()).eval()) >
                    1e-10 * std::max(max_abs(rho), 1.0)) {
                    throw ToleranceError("evaluated series state lost Hermiticity");
                }
                for (const auto& obs : cfg.observables) {
                    row.values.push_back((rho * obs.matrix).trace().real());
                }
                artifacts.states.push_back(rho);
                break;
            }
            case Method::kraus_circuit: {
                int order = 0;
                if (!exact_suite) {
                    auto [chosen, bound] = detail::series_order_and_bound(cfg, *cls, t);
                    order = chosen;
                    row.bound = bound;
                }
                const auto circuits = detail::circuit_family(cfg, *cls, t, order);
                row.values = detail::run_circuit_suite(cfg, circuits);
                Json entry;
                entry["t"] = t;
                Json list = Json::array();
                for (const auto& c : circuits) list.push_back(circuit_to_json(c));
                entry["circuits"] = std::move(list);
                dump_times.push_back(std::move(entry));
                break;
            }
        }
        artifacts.trajectory.rows.push_back(std::move(row));
    }
    if (cfg.method == Method::kraus_circuit) {
        artifacts.circuit_dump = Json{{"times", std::move(dump_times)}};
    }
    artifacts.classification = cls;
    return artifacts;
}

/// Executes and writes trajectory.csv (and circuits.json for the circuit
/// method) under out_dir.
inline RunArtifacts run_config(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    RunArtifacts artifacts = execute(cfg);
    std::filesystem::create_directories(out_dir);
    detail::write_trajectory_csv(out_dir / "trajectory.csv", artifacts.trajectory);
    if (cfg.method == Method::kraus_circuit) {
        std::ofstream out(out_dir / "circuits.json", std::ios::binary);
        out << artifacts.circuit_dump.dump(2) << "\n";
    }
    return artifacts;
}

/// Builds only the circuit suites and writes circuits.json.
inline Json dump_circuits(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const auto cls = detail::require_series(cfg);
    const bool exact_suite =
        cfg.preset == Preset::pauli_channel || cfg.preset == Preset::damped_qho;
    Json dump_times = Json::array();
    for (double t : cfg.times) {
        int order = 0;
        if (!exact_suite) order = detail::series_order_and_bound(cfg, cls, t).first;
        Json entry;
        entry["t"] = t;
        Json list = Json::array();
        for (const auto& c : detail::circuit_family(cfg, cls, t, order)) {
            list.push_back(circuit_to_json(c));
        }
        entry["circuits"] = std::move(list);
        dump_times.push_back(std::move(entry));
    }
    Json dump{{"times", std::move(dump_times)}};
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "circuits.json", std::ios::binary);
    out << dump.dump(2) << "\n";
    return dump;
}

struct BoundRow {
    double t = 0.0;
    int order = 0;
    std::optional<int> order_analytic;
    double bound = 0.0;
};

/// Truncation-order report: chosen order, the advisory closed-form order
/// when defined, and the tail bound.  Exact finite suites report zero.
inline std::vector<BoundRow> bound_report(const RunConfig& cfg,
                                          const std::filesystem::path& out_dir) {
    const auto cls = detail::require_series(cfg);
    const bool exact_suite =
        cfg.preset == Preset::pauli_channel || cfg.preset == Preset::damped_qho;
    std::vector<BoundRow> rows;
    for (double t : cfg.times) {
        BoundRow row;
        row.t = t;
        if (exact_suite) {
            row.order = cfg.preset == Preset::damped_qho
                            ? cfg.qho->max_occupied()
                            : static_cast<int>(cfg.pauli_strings.size());
            row.bound = 0.0;  // finite suites are exact
        } else {
            const auto scan = truncation_order(cfg.sys(), cls, t, cfg.epsilon);
            row.order = scan.scanned;
            row.order_analytic = scan.analytic;
            row.bound = error_bound(cfg.sys(), cls, t, scan.scanned).value_or(0.0);
        }
        rows.push_back(row);
    }
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "bound.csv", std::ios::binary);
    out << "t,order,order_analytic,bound\n";
    for (const auto& row : rows) {
        out << detail::format_value(row.t) << "," << row.order << ","
            << (row.order_analytic ? std::to_string(*row.order_analytic) : std::string("-1"))
            << "," << detail::format_value(row.bound) << "\n";
    }
    return rows;
}

struct ValidateReport {
    double kraus_vs_expm = 0.0;      // max trace distance over times
    double circuit_vs_matrix = 0.0;  // max absolute observable deviation
    double rk4_vs_expm = 0.0;        // informational
    bool pass = false;
    std::string text;
};

/// Runs all four methods on one config and cross-checks them; writes one
/// trajectory per method plus validate_report.txt.
inline ValidateReport validate_cross(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const Eigen::Index d = cfg.sys().dim();
    if (d * d > 4096) {
        throw ConfigError("validate: dimension too large for the dense propagator oracle");
    }
    detail::require_series(cfg);

    std::map<Method, RunArtifacts> runs;
    for (Method m : {Method::expm, Method::rk4, Method::kraus_matrix, Method::kraus_circuit}) {
        RunConfig per = cfg;
        per.method = m;
        runs[m] = execute(per);
    }

    ValidateReport report;
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        report.kraus_vs_expm =
            std::max(report.kraus_vs_expm, trace_distance(runs[Method::kraus_matrix].states[i],
                                                          runs[Method::expm].states[i]));
        report.rk4_vs_expm = std::max(
            report.rk4_vs_expm,
            trace_distance(runs[Method::rk4].states[i], runs[Method::expm].states[i]));
        for (std::size_t k = 0; k < cfg.observables.size(); ++k) {
            const double circuit_value = runs[Method::kraus_circuit].trajectory.rows[i].values[k];
            const double matrix_value = runs[Method::kraus_matrix].trajectory.rows[i].values[k];
            report.circuit_vs_matrix =
                std::max(report.circuit_vs_matrix, std::abs(circuit_value - matrix_value));
        }
    }
    report.pass = report.kraus_vs_expm <= std::max(cfg.epsilon, 1e-7) &&
                  report.circuit_vs_matrix <= 1e-7;

    std::ostringstream text;
    text << "kraus_matrix vs expm (max trace distance): "
         << detail::format_value(report.kraus_vs_expm) << "\n"
         << "kraus_circuit vs kraus_matrix (max observable deviation): "
         << detail::format_value(report.circuit_vs_matrix) << "\n"
         << "rk4 vs expm (max trace distance, informational): "
         << detail::format_value(report.rk4_vs_expm) << "\n"
         << (report.pass ? "PASS" : "FAIL") << "\n";
    report.text = text.str();

    std::filesystem::create_directories(out_dir);
    for (auto& [method, artifacts] : runs) {
        detail::write_trajectory_csv(
            out_dir / (std::string("trajectory_") + to_string(method) + ".csv"),
            artifacts.trajectory);
    }
    std::ofstream out(out_dir / "validate_report.txt", std::ios::binary);
    out << report.text;
    return report;
}

/// Text form of a classification, for the CLI.
inline std::string classification_report(const CaseClassification& cls) {
    std::ostringstream out;
    out << "label: " << to_string(cls.label) << "\n";
    out << "alpha: " << detail::format_value(cls.alpha) << "\n";
    out << "c: " << detail::format_value(cls.c) << "\n";
    if (cls.nu) {
        out << "nu: " << detail::format_value(cls.nu->real()) << " + "
            << detail::format_value(cls.nu->imag()) << "i\n";
    }
    if (cls.lambda) {
        out << "lambda: " << detail::format_value(cls.lambda->real()) << " + "
            << detail::format_value(cls.lambda->imag()) << "i\n";
    }
    out << "residuals: i=" << detail::format_value(cls.residuals.h_damping_commutator)
        << " ii=" << detail::format_value(cls.residuals.damping_pairwise)
        << " iii=" << detail::format_value(cls.residuals.eigen_h)
        << " iv=" << detail::format_value(cls.residuals.eigen_damping)
        << " fit=" << detail::format_value(cls.residuals.superop_fit) << "\n";
    if (cls.label == CommutatorClass::unsupported) {
        out << "failing condition: " << cls.failing_condition << "\n";
    }
    return out.str();
}

}  // namespace kraussim
