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

#include <nlohmann/json.hpp>

#include "kraussim/circuit.hpp"

// JSON form of the circuit IR.  Complex numbers are [re, im] pairs and
// matrices are row-lists; field names are part of the dump format.

namespace kraussim {

using Json = nlohmann::json;

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("expected a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a row-list matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols) {
            throw std::invalid_argument("ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(i, c) = complex_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
        }
    }
    return m;
}

inline Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

inline Vector vector_from_json(const Json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

inline Json gate_to_json(const Gate& g) {
    Json out;
    switch (g.kind) {
        case Gate::Kind::pauli:
            out["kind"] = "pauli";
            out["axis"] = g.axis == PauliAxis::x ? "x" : (g.axis == PauliAxis::y ? "y" : "z");
            out["qubit"] = g.target;
            break;
        case Gate::Kind::phase:
            out["kind"] = "phase";
            out["theta"] = g.angle;
            out["qubit"] = g.target;
            break;
        case Gate::Kind::controlled_phase:
            out["kind"] = "controlled_phase";
            out["theta"] = g.angle;
            out["controls"] = g.controls;
            out["target"] = g.target;
            break;
        case Gate::Kind::controlled_ry:
            out["kind"] = "controlled_ry";
            out["beta"] = g.angle;
            out["controls"] = g.controls;
            out["target"] = g.target;
            break;
        case Gate::Kind::opaque_unitary:
            out["kind"] = "opaque_unitary";
            out["matrix"] = matrix_to_json(g.matrix);
            out["qubits"] = g.qubits;
            break;
        case Gate::Kind::permutation:
            out["kind"] = "permutation";
            out["mapping"] = g.mapping;
            out["qubits"] = g.qubits;
            break;
        case Gate::Kind::state_prep:
            out["kind"] = "state_prep";
            out["amplitudes"] = vector_to_json(g.amplitudes);
            out["qubits"] = g.qubits;
            break;
    }
    return out;
}

inline Gate gate_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pauli") {
        const std::string axis = j.at("axis").get<std::string>();
        PauliAxis a = axis == "x" ? PauliAxis::x : (axis == "y" ? PauliAxis::y : PauliAxis::z);
        if (axis != "x" && axis != "y" && axis != "z") {
            throw std::invalid_argument("pauli gate axis must be x, y or z");
        }
        return Gate::make_pauli(a, j.at("qubit").get<int>());
    }
    if (kind == "phase") {
        return Gate::make_phase(j.at("theta").get<double>(), j.at("qubit").get<int>());
    }
    if (kind == "controlled_phase") {
        return Gate::make_controlled_phase(j.at("theta").get<double>(),
                                           j.at("controls").get<std::vector<int>>(),
                                           j.at("target").get<int>());
    }
    if (kind == "controlled_ry") {
        return Gate::make_controlled_ry(j.at("beta").get<double>(),
                                        j.at("controls").get<std::vector<int>>(),
                                        j.at("target").get<int>());
    }
    if (kind == "opaque_unitary") {
        return Gate::make_opaque(matrix_from_json(j.at("matrix")),
                                 j.at("qubits").get<std::vector<int>>());
    }
    if (kind == "permutation") {
        return Gate::make_permutation(j.at("mapping").get<std::vector<int>>(),
                                      j.at("qubits").get<std::vector<int>>());
    }
    if (kind == "state_prep") {
        return Gate::make_state_prep(vector_from_json(j.at("amplitudes")),
                                     j.at("qubits").get<std::vector<int>>());
    }
    throw std::invalid_argument("unknown gate kind: " + kind);
}

inline Json circuit_to_json(const Circuit& c) {
    Json out;
    out["n_system"] = c.n_system;
    Json ancillas = Json::array();
    for (const auto& a : c.ancillas) {
        ancillas.push_back({{"role", a.role == Ancilla::Role::sznagy ? "sznagy" : "prep"},
                            {"index", a.index}});
    }
    out["ancillas"] = std::move(ancillas);
    Json gates = Json::array();
    for (const auto& g : c.gates) gates.push_back(gate_to_json(g));
    out["gates"] = std::move(gates);
    out["postselect_mask"] = c.postselect_mask;
    out["weight"] = c.weight;
    out["global_phase"] = c.global_phase;
    return out;
}

inline Circuit circuit_from_json(const Json& j) {
    Circuit c;
    c.n_system = j.at("n_system").get<int>();
    for (const auto& a : j.at("ancillas")) {
        const std::string role = a.at("role").get<std::string>();
        if (role != "sznagy" && role != "prep") {
            throw std::invalid_argument("ancilla role must be sznagy or prep");
        }
        c.ancillas.push_back({role == "sznagy" ? Ancilla::Role::sznagy : Ancilla::Role::prep,
                              a.at("index").get<int>()});
    }
    for (const auto& g : j.at("gates")) c.gates.push_back(gate_from_json(g));
    c.postselect_mask = j.at("postselect_mask").get<std::vector<int>>();
    c.weight = j.at("weight").get<double>();
    c.global_phase = j.value("global_phase", 0.0);
    return c;
}

}  // namespace kraussim
