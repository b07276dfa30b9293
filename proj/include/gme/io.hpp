#pragma once

// State descriptors, JSON ingestion of states and operators, and report serialization.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gme/core.hpp"
#include "gme/oprange.hpp"

namespace gme {

using json = nlohmann::json;

namespace detail {

inline int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw std::invalid_argument("bad " + what + " '" + s + "'");
  return v;
}

inline double parse_double(const std::string& s, const std::string& what) {
  if (s.empty()) throw std::invalid_argument("missing " + what);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad " + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("bad " + what + " '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline cplx parse_pair(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json pair_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace detail

/// {"dims": [...], "amplitudes": [[re, im], ...], "label": optional}. Warns on `warn` when the norm is off by > 1e-6.
inline State state_from_json(const json& j, std::ostream* warn = &std::cerr) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("amplitudes"))
    throw std::invalid_argument("state JSON needs 'dims' and 'amplitudes'");
  std::vector<int> dims;
  for (const auto& d : j.at("dims")) {
    if (!d.is_number_integer()) throw std::invalid_argument("dims must be integers");
    dims.push_back(d.get<int>());
  }
  std::vector<cplx> amps;
  for (const auto& a : j.at("amplitudes")) amps.push_back(detail::parse_pair(a));
  State s(std::move(dims), std::move(amps), j.value("label", std::string("file")));
  if (warn && std::abs(s.input_norm() - 1.0) > 1e-6)
    *warn << "warning: state norm " << s.input_norm() << " differs from 1; normalized on load\n";
  return s;
}

inline json state_to_json(const State& s) {
  json amps = json::array();
  for (const auto& z : s.amplitudes()) amps.push_back(detail::pair_json(z));
  return json{{"dims", s.dims()}, {"amplitudes", amps}, {"label", s.label()}};
}

inline State load_state_file(const std::string& path, std::ostream* warn = &std::cerr) {
  return state_from_json(detail::read_json_file(path), warn);
}

/// {"dims": [dA, dB], "matrix": [[re, im], ...]} row-major.
inline HermitianOperator operator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("matrix"))
    throw std::invalid_argument("operator JSON needs 'dims' and 'matrix'");
  const auto dims = j.at("dims").get<std::vector<int>>();
  if (dims.size() != 2) throw std::invalid_argument("operators must be bipartite: dims = [dA, dB]");
  const int dim = dims[0] * dims[1];
  const auto& m = j.at("matrix");
  if (!m.is_array() || static_cast<int>(m.size()) != dim * dim)
    throw std::invalid_argument("operator matrix must have " + std::to_string(dim * dim) + " entries");
  CMatrix x(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) x(r, c) = detail::parse_pair(m[r * dim + c]);
  return HermitianOperator(dims[0], dims[1], std::move(x), 1e-10);
}

inline json operator_to_json(const HermitianOperator& x) {
  json m = json::array();
  for (Eigen::Index r = 0; r < x.matrix().rows(); ++r)
    for (Eigen::Index c = 0; c < x.matrix().cols(); ++c) m.push_back(detail::pair_json(x.matrix()(r, c)));
  return json{{"dims", {x.dim_a(), x.dim_b()}}, {"matrix", m}};
}

inline HermitianOperator load_operator_file(const std::string& path) {
  return operator_from_json(detail::read_json_file(path));
}

/// Parses ghz:n, w:n, dicke:n,j, graph:<rows>, cycle:n, c5, b, bell, wghz:s, dicke12:s, file:path.
/// Graph rows are 0/1 strings separated by commas, e.g. graph:011,101,110.
inline State make_named_state(const std::string& desc, std::ostream* warn = &std::cerr) {
  const auto colon = desc.find(':');
  const std::string name = desc.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : desc.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw std::invalid_argument("state '" + name + "' needs an argument");
  };
  auto no_arg = [&] {
    if (colon != std::string::npos) throw std::invalid_argument("state '" + name + "' takes no argument");
  };
  if (name == "ghz") return need_arg(), ghz_state(detail::parse_int(arg, "qubit count"));
  if (name == "w") return need_arg(), w_state(detail::parse_int(arg, "qubit count"));
  if (name == "dicke") {
    need_arg();
    const auto parts = detail::split(arg, ',');
    if (parts.size() != 2) throw std::invalid_argument("dicke needs n,j");
    return dicke_state(detail::parse_int(parts[0], "qubit count"), detail::parse_int(parts[1], "excitation count"));
  }
  if (name == "graph") {
    need_arg();
    Adjacency adj;
    for (const auto& row : detail::split(arg, ',')) {
      std::vector<int> r;
      for (char ch : row) {
        if (ch != '0' && ch != '1') throw std::invalid_argument("graph rows must be 0/1 strings");
        r.push_back(ch - '0');
      }
      adj.push_back(r);
    }
    return graph_state(adj, desc);
  }
  if (name == "cycle") {
    need_arg();
    const int n = detail::parse_int(arg, "vertex count");
    return graph_state(cycle_graph(n), desc);
  }
  if (name == "c5" || name == "graph-c5") return no_arg(), graph_state(cycle_graph(5), "graph-c5");
  if (name == "b" || name == "b_state") return no_arg(), b_state();
  if (name == "bell") return no_arg(), ghz_state(2).with_label("bell");
  if (name == "wghz") return need_arg(), wghz_state(detail::parse_double(arg, "weight s"));
  if (name == "dicke12") return need_arg(), dicke12_state(detail::parse_double(arg, "weight s"));
  if (name == "file") return need_arg(), load_state_file(arg, warn);
  throw std::invalid_argument("unknown state '" + name + "'");
}

/// Operators: upb (the tiles witness operator) or file:path.
inline HermitianOperator make_named_operator(const std::string& desc) {
  if (desc == "upb" || desc == "upb-tiles") return upb_tiles_operator();
  if (desc.rfind("file:", 0) == 0) return load_operator_file(desc.substr(5));
  throw std::invalid_argument("unknown operator '" + desc + "'");
}

namespace detail {

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

inline json report_to_json(const BoundReport& r, bool timing = false) {
  json j{{"method", to_string(r.method)},
         {"level", r.level},
         {"lambda2_upper", detail::opt_json(r.lambda2_upper)},
         {"lambda2_lower", detail::opt_json(r.lambda2_lower)},
         {"eg_lower", detail::opt_json(r.eg_lower())},
         {"eg_upper", detail::opt_json(r.eg_upper())},
         {"dk", detail::opt_json(r.dk)},
         {"iterations", r.iterations},
         {"seed", r.seed},
         {"converged", r.converged},
         {"residual", detail::opt_json(r.residual)},
         {"detail", r.detail}};
  if (timing) j["wall_time"] = r.wall_time;
  return j;
}

inline std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

}  // namespace gme
