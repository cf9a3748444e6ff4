// Copyright 2026 The uhlmann-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ulab/io.hpp"

#include <fstream>
#include <sstream>

#include "ulab/linalg.hpp"

namespace ulab {

json to_json(const Mat& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(m(i, j).real());
      data.push_back(m(i, j).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

json to_json(const Vec& v) {
  json data = json::array();
  for (const auto& z : v) {
    data.push_back(z.real());
    data.push_back(z.imag());
  }
  return data;
}

json to_json(const Circuit& c) {
  json gates = json::array();
  for (const auto& g : c.gates()) {
    json q = json::array({g.q[0]});
    if (gate_arity(g.kind) == 2) q.push_back(g.q[1]);
    gates.push_back({{"g", std::string(gate_name(g.kind))}, {"q", q}});
  }
  return {{"n_qubits", c.n_qubits()}, {"gates", gates}};
}

json to_json(const ChannelDesc& ch) {
  return {{"d_in", ch.d_in},   {"d_anc", ch.d_anc},         {"d_out", ch.d_out},
          {"d_env", ch.d_env}, {"anc_state", ch.anc_state}, {"dilation", to_json(ch.dilation)}};
}

Mat mat_from_json(const json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != 2 * rows * cols) throw ParseError("matrix data has the wrong length");
    Mat m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index c = 0; c < cols; ++c, k += 2) m(i, c) = cplx(data[k].get<double>(), data[k + 1].get<double>());
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("matrix: ") + e.what());
  }
}

Vec vec_from_json(const json& j) {
  try {
    if (!j.is_array()) throw ParseError("vector must be an array");
    if (!j.empty() && j[0].is_array()) {
      Vec v(static_cast<Eigen::Index>(j.size()));
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != 2) throw ParseError("vector entry must be a (re, im) pair");
        v(static_cast<Eigen::Index>(i)) = cplx(j[i][0].get<double>(), j[i][1].get<double>());
      }
      return v;
    }
    if (j.size() % 2 != 0) throw ParseError("interleaved vector has odd length");
    Vec v(static_cast<Eigen::Index>(j.size() / 2));
    for (std::size_t i = 0; i < j.size() / 2; ++i)
      v(static_cast<Eigen::Index>(i)) = cplx(j[2 * i].get<double>(), j[2 * i + 1].get<double>());
    return v;
  } catch (const json::exception& e) {
    throw ParseError(std::string("vector: ") + e.what());
  }
}

Circuit circuit_from_json(const json& j) {
  try {
    const auto n = j.at("n_qubits").get<int>();
    if (n <= 0) throw ParseError("n_qubits must be positive");
    Circuit c(static_cast<unsigned>(n));
    for (const auto& g : j.at("gates")) {
      const auto kind = parse_gate(g.at("g").get<std::string>());
      const auto q = g.at("q").get<std::vector<int>>();
      if (q.size() != gate_arity(kind))
        throw ParseError("gate " + std::string(gate_name(kind)) + " expects " + std::to_string(gate_arity(kind)) +
                         " targets");
      for (int t : q)
        if (t < 0) throw ParseError("negative qubit index");
      if (q.size() == 1)
        c.add(kind, static_cast<unsigned>(q[0]));
      else
        c.add(kind, static_cast<unsigned>(q[0]), static_cast<unsigned>(q[1]));
    }
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("circuit: ") + e.what());
  }
}

ChannelDesc channel_from_json(const json& j) {
  try {
    ChannelDesc ch;
    if (j.contains("circuit")) {
      // Dilation circuit on in (x) anc qubits; env = listed qubits of the output.
      Circuit c = circuit_from_json(j.at("circuit"));
      const auto n_in = j.at("n_in").get<unsigned>();
      auto env = j.at("env").get<std::vector<unsigned>>();
      const unsigned n = c.n_qubits();
      if (n_in > n) throw ParseError("n_in exceeds circuit width");
      Mat u = c.unitary();
      // Reorder output qubits so the environment comes last.
      std::vector<std::size_t> perm;
      std::vector<bool> is_env(n, false);
      for (auto e : env) {
        if (e >= n) throw ParseError("environment qubit out of range");
        is_env[e] = true;
      }
      for (unsigned q = 0; q < n; ++q)
        if (!is_env[q]) perm.push_back(q);
      for (auto e : env) perm.push_back(e);
      Mat p = Mat::Zero(u.rows(), u.cols());
      for (std::size_t k = 0; k < c.dim(); ++k) {
        std::size_t out = 0;
        for (unsigned j2 = 0; j2 < n; ++j2) out = (out << 1) | ((k >> (n - 1 - perm[j2])) & 1);
        p(out, k) = 1.0;
      }
      ch.dilation = p * u;
      ch.d_in = std::size_t{1} << n_in;
      ch.d_anc = std::size_t{1} << (n - n_in);
      ch.d_env = std::size_t{1} << env.size();
      ch.d_out = c.dim() / ch.d_env;
      ch.anc_state = 0;
    } else {
      ch.dilation = mat_from_json(j.at("dilation"));
      ch.d_in = j.at("d_in").get<std::size_t>();
      ch.d_anc = j.at("d_anc").get<std::size_t>();
      ch.d_out = j.at("d_out").get<std::size_t>();
      ch.d_env = j.at("d_env").get<std::size_t>();
      ch.anc_state = j.value("anc_state", std::size_t{0});
    }
    ch.validate();
    return ch;
  } catch (const json::exception& e) {
    throw ParseError(std::string("channel: ") + e.what());
  }
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) { return parse_json(read_text_file(path), path.string()); }

}  // namespace ulab
