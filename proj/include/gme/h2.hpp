#pragma once

// Second hierarchy: tree tensor networks of k copies, projected per leg group onto symmetric subspaces.

#include <algorithm>
#include <chrono>
#include <numeric>
#include <queue>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "gme/h1.hpp"
#include "gme/sym.hpp"

namespace gme {

struct TreeEdge {
  int u = 0;
  int v = 0;
  int type = 0;  ///< 0-based party index
};

/// Typed tree over `vertices` copies of an n-party state. Vertex 0 is the root and holds a ket.
struct TreeSpec {
  int vertices = 1;
  int parties = 2;
  std::vector<TreeEdge> edges;
  std::string label;

  void validate() const {
    if (vertices < 1) throw std::invalid_argument("tree needs at least one vertex");
    if (parties < 2) throw std::invalid_argument("tree needs at least two party types");
    if (static_cast<int>(edges.size()) != vertices - 1)
      throw std::invalid_argument("tree on " + std::to_string(vertices) + " vertices needs " +
                                  std::to_string(vertices - 1) + " edges");
    std::vector<std::vector<int>> used(vertices, std::vector<int>(parties, 0));
    std::vector<int> parent(vertices);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges) {
      if (e.u < 0 || e.u >= vertices || e.v < 0 || e.v >= vertices || e.u == e.v)
        throw std::invalid_argument("tree edge has invalid endpoints");
      if (e.type < 0 || e.type >= parties) throw std::invalid_argument("tree edge type out of range");
      if (used[e.u][e.type]++ || used[e.v][e.type]++)
        throw std::invalid_argument("vertex has two incident edges of type " + std::to_string(e.type + 1));
      const int a = find(e.u), b = find(e.v);
      if (a == b) throw std::invalid_argument("tree contains a cycle");
      parent[a] = b;
    }
  }

  /// Open legs per party type: every edge of that type consumes one leg on each endpoint.
  std::vector<int> open_leg_counts() const {
    std::vector<int> counts(parties, vertices);
    for (const auto& e : edges) counts[e.type] -= 2;
    return counts;
  }

  /// Proper 2-colouring from the root: 0 = ket, 1 = bra.
  std::vector<int> colouring() const {
    std::vector<std::vector<int>> adj(vertices);
    for (const auto& e : edges) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<int> colour(vertices, -1);
    colour[0] = 0;
    std::queue<int> q;
    q.push(0);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      for (int y : adj[x])
        if (colour[y] < 0) {
          colour[y] = 1 - colour[x];
          q.push(y);
        }
    }
    return colour;
  }
};

/// Path over labels.size()+1 vertices; edge j joins vertices j and j+1 with 1-based party type labels[j].
inline TreeSpec path_tree(const std::vector<int>& labels, int parties) {
  TreeSpec t;
  t.vertices = static_cast<int>(labels.size()) + 1;
  t.parties = parties;
  std::ostringstream name;
  name << "path:";
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 1 || labels[j] > parties)
      throw std::invalid_argument("path label " + std::to_string(labels[j]) + " outside 1.." + std::to_string(parties));
    t.edges.push_back({static_cast<int>(j), static_cast<int>(j) + 1, labels[j] - 1});
    name << (j ? "," : "") << labels[j];
  }
  t.label = name.str();
  t.validate();
  return t;
}

/// Path over k vertices with labels 1,2,...,n,1,2,...
inline TreeSpec path_cyclic(int k, int parties) {
  if (k < 1) throw std::invalid_argument("path-cyclic needs k >= 1");
  std::vector<int> labels;
  for (int j = 0; j + 1 < k; ++j) labels.push_back(j % parties + 1);
  TreeSpec t = path_tree(labels, parties);
  t.label = "path-cyclic:" + std::to_string(k);
  return t;
}

/// Parses `path:1,3,2`, `path-cyclic:10` or `tree:(0-1:1),(1-2:3)`; party types are 1-based.
inline TreeSpec parse_tree(const std::string& text, int parties) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("tree descriptor needs a ':' in '" + text + "'");
  const std::string kind = text.substr(0, colon), body = text.substr(colon + 1);
  if (kind == "path") {
    std::vector<int> labels;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument("bad path label '" + item + "'");
      labels.push_back(v);
    }
    if (labels.empty()) throw std::invalid_argument("path needs at least one label");
    return path_tree(labels, parties);
  }
  if (kind == "path-cyclic") {
    std::size_t used = 0;
    const int k = std::stoi(body, &used);
    if (used != body.size()) throw std::invalid_argument("bad path-cyclic level '" + body + "'");
    return path_cyclic(k, parties);
  }
  if (kind == "tree") {
    static const std::regex edge_re(R"(\(\s*(\d+)\s*-\s*(\d+)\s*:\s*(\d+)\s*\))");
    TreeSpec t;
    t.parties = parties;
    t.label = text;
    int max_vertex = 0;
    std::size_t consumed = 0;
    for (auto it = std::sregex_iterator(body.begin(), body.end(), edge_re); it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      const std::string gap = body.substr(consumed, m.position() - consumed);
      if (gap.find_first_not_of(", ") != std::string::npos) throw std::invalid_argument("bad tree descriptor '" + text + "'");
      consumed = m.position() + m.length();
      TreeEdge e{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]) - 1};
      max_vertex = std::max({max_vertex, e.u, e.v});
      t.edges.push_back(e);
    }
    if (t.edges.empty() || body.substr(consumed).find_first_not_of(", ") != std::string::npos)
      throw std::invalid_argument("bad tree descriptor '" + text + "'");
    t.vertices = max_vertex + 1;
    t.validate();
    return t;
  }
  throw std::invalid_argument("unknown tree kind '" + kind + "'");
}

/// An open leg of the contracted network.
struct TreeLeg {
  int type = 0;
  int vertex = 0;
  bool operator<(const TreeLeg& o) const { return type != o.type ? type < o.type : vertex < o.vertex; }
  bool operator==(const TreeLeg& o) const { return type == o.type && vertex == o.vertex; }
};

struct TreeTensor {
  std::vector<TreeLeg> legs;  ///< index order of `data`
  std::vector<int> dims;
  std::vector<cplx> data;
};

namespace detail {

inline std::vector<cplx> permute_tensor(const std::vector<cplx>& data, const std::vector<int>& dims,
                                        const std::vector<int>& perm) {
  const int r = static_cast<int>(dims.size());
  std::vector<int> new_dims(r);
  for (int i = 0; i < r; ++i) new_dims[i] = dims[perm[i]];
  const auto old_strides = row_major_strides(dims);
  std::vector<std::size_t> src_stride(r);
  for (int i = 0; i < r; ++i) src_stride[i] = old_strides[perm[i]];
  std::vector<cplx> out(data.size());
  std::vector<int> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = data[src];
    for (int i = r - 1; i >= 0; --i) {
      src += src_stride[i];
      if (++idx[i] < new_dims[i]) break;
      src -= src_stride[i] * new_dims[i];
      idx[i] = 0;
    }
  }
  return out;
}

// Moves the listed positions (in order) to the end, keeping the others in place.
inline std::vector<int> move_to_back(int rank, const std::vector<int>& positions) {
  std::vector<int> perm;
  for (int i = 0; i < rank; ++i)
    if (std::find(positions.begin(), positions.end(), i) == positions.end()) perm.push_back(i);
  perm.insert(perm.end(), positions.begin(), positions.end());
  return perm;
}

}  // namespace detail

/// Contracts copies of psi (kets on even, bras on odd tree depth) along the typed edges.
/// Output legs are sorted by (type, vertex).
inline TreeTensor contract_tree(const State& psi, const TreeSpec& tree, std::size_t cap = kDefaultMaxEntries) {
  tree.validate();
  const int n = psi.parties();
  if (tree.parties != n) throw std::invalid_argument("tree party count does not match the state");
  const auto& dims = psi.dims();
  const auto counts = tree.open_leg_counts();
  double open = 1.0;
  for (int i = 0; i < n; ++i) open *= std::pow(static_cast<double>(dims[i]), counts[i]);
  if (open > static_cast<double>(cap))
    throw CapExceeded("tree tensor", open > 1e18 ? SIZE_MAX : static_cast<std::size_t>(open), cap);

  const auto colour = tree.colouring();
  std::vector<cplx> conj_amps(psi.amplitudes());
  for (auto& z : conj_amps) z = std::conj(z);
  auto copy_legs = [&](int vertex) {
    std::vector<TreeLeg> legs;
    for (int i = 0; i < n; ++i) legs.push_back({i, vertex});
    return legs;
  };

  TreeTensor t{copy_legs(0), dims, psi.amplitudes()};
  std::vector<bool> placed(tree.vertices, false);
  placed[0] = true;
  for (int added = 1; added < tree.vertices;) {
    for (const auto& e : tree.edges) {
      if (placed[e.u] == placed[e.v]) continue;
      const int inside = placed[e.u] ? e.u : e.v;
      const int fresh = placed[e.u] ? e.v : e.u;
      const int rank = static_cast<int>(t.legs.size());
      const int pos = static_cast<int>(std::find(t.legs.begin(), t.legs.end(), TreeLeg{e.type, inside}) - t.legs.begin());
      const int d = dims[e.type];

      // Network as (rest x d), new copy as (d x rest'), joined by one matrix product.
      const auto perm = detail::move_to_back(rank, {pos});
      std::vector<cplx> left = detail::permute_tensor(t.data, t.dims, perm);
      const std::vector<cplx>& amps = colour[fresh] == 0 ? psi.amplitudes() : conj_amps;
      std::vector<int> copy_perm{e.type};
      for (int i = 0; i < n; ++i)
        if (i != e.type) copy_perm.push_back(i);
      std::vector<cplx> right = detail::permute_tensor(amps, dims, copy_perm);
      const Eigen::Index rows = static_cast<Eigen::Index>(left.size() / d);
      const Eigen::Index cols = static_cast<Eigen::Index>(right.size() / d);
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> lm(left.data(), rows, d);
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> rm(right.data(), d, cols);
      Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> prod = lm * rm;

      TreeTensor next;
      for (int i = 0; i + 1 < rank; ++i) {
        next.legs.push_back(t.legs[perm[i]]);
        next.dims.push_back(t.dims[perm[i]]);
      }
      for (int i = 1; i < n; ++i) {
        next.legs.push_back({copy_perm[i], fresh});
        next.dims.push_back(dims[copy_perm[i]]);
      }
      next.data.assign(prod.data(), prod.data() + prod.size());
      t = std::move(next);
      placed[fresh] = true;
      ++added;
    }
  }

  std::vector<int> order(t.legs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return t.legs[a] < t.legs[b]; });
  TreeTensor out;
  for (int i : order) {
    out.legs.push_back(t.legs[i]);
    out.dims.push_back(t.dims[i]);
  }
  out.data = t.dims.empty() ? t.data : detail::permute_tensor(t.data, t.dims, order);
  return out;
}

/// Open legs of one party type on copies of one conjugation colour.
struct LegGroup {
  int type = 0;
  int colour = 0;
  int size = 0;
};

inline std::vector<LegGroup> tree_leg_groups(const TreeSpec& tree) {
  const auto colour = tree.colouring();
  std::vector<std::vector<int>> busy(tree.vertices, std::vector<int>(tree.parties, 0));
  for (const auto& e : tree.edges) busy[e.u][e.type] = busy[e.v][e.type] = 1;
  std::vector<LegGroup> groups;
  for (int i = 0; i < tree.parties; ++i)
    for (int c = 0; c < 2; ++c) {
      LegGroup g{i, c, 0};
      for (int v = 0; v < tree.vertices; ++v)
        if (!busy[v][i] && colour[v] == c) ++g.size;
      if (g.size > 0) groups.push_back(g);
    }
  return groups;
}

/// (prod over leg groups of C(k_g + d - 1, k_g))^(-1/k) with d the largest local dimension.
inline double h2_dk(const TreeSpec& tree, int d) {
  double log_sum = 0.0;
  for (const auto& g : tree_leg_groups(tree)) log_sum += log_binomial(g.size + d - 1, g.size);
  return std::exp(-log_sum / tree.vertices);
}

/// Squared norm of the tree tensor after projecting every leg group onto its symmetric subspace.
inline double h2_projected_norm_squared(const State& psi, const TreeSpec& tree, std::size_t cap = kDefaultMaxEntries) {
  TreeTensor t = contract_tree(psi, tree, cap);
  if (t.legs.empty()) {
    CompensatedSum s;
    for (const auto& z : t.data) s.add(std::norm(z));
    return s.value();
  }
  const auto colour = tree.colouring();

  // Reorder legs to (type, colour, vertex) so each group is contiguous.
  std::vector<int> order(t.legs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& x = t.legs[a];
    const auto& y = t.legs[b];
    if (x.type != y.type) return x.type < y.type;
    return colour[x.vertex] < colour[y.vertex];
  });
  std::vector<cplx> data = detail::permute_tensor(t.data, t.dims, order);

  // Block layout after reordering: one block per group, block sizes d^{k_g}.
  std::vector<std::size_t> block_dim;
  std::vector<int> block_legs, block_d;
  for (std::size_t i = 0; i < order.size();) {
    const auto& leg = t.legs[order[i]];
    std::size_t j = i;
    std::size_t size = 1;
    while (j < order.size() && t.legs[order[j]].type == leg.type &&
           colour[t.legs[order[j]].vertex] == colour[leg.vertex]) {
      size *= t.dims[order[j]];
      ++j;
    }
    block_dim.push_back(size);
    block_legs.push_back(static_cast<int>(j - i));
    block_d.push_back(t.dims[order[i]]);
    i = j;
  }

  for (std::size_t b = 0; b < block_dim.size(); ++b) {
    if (block_legs[b] < 2) continue;
    const SparseMatrix s = symmetric_isometry(block_d[b], block_legs[b], cap);
    std::size_t outer = 1, inner = 1;
    for (std::size_t a = 0; a < b; ++a) outer *= block_dim[a];
    for (std::size_t a = b + 1; a < block_dim.size(); ++a) inner *= block_dim[a];
    const std::size_t sym = static_cast<std::size_t>(s.cols());
    std::vector<cplx> next(outer * sym * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (Eigen::Index r = 0; r < s.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
          const cplx w = it.value();
          const cplx* src = &data[(o * block_dim[b] + r) * inner];
          cplx* dst = &next[(o * sym + it.col()) * inner];
          for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
        }
    data = std::move(next);
    block_dim[b] = sym;
  }
  CompensatedSum s;
  for (const auto& z : data) s.add(std::norm(z));
  return s.value();
}

inline BoundReport h2_bounds(const State& psi, const TreeSpec& tree, std::size_t cap = kDefaultMaxEntries) {
  const auto t0 = std::chrono::steady_clock::now();
  const double norm2 = h2_projected_norm_squared(psi, tree, cap);
  BoundReport r;
  r.method = Method::H2;
  r.level = tree.vertices;
  r.lambda2_upper = kth_root(norm2, tree.vertices);
  r.dk = h2_dk(tree, psi.max_dim());
  r.lambda2_lower = *r.dk * *r.lambda2_upper;
  r.detail = tree.label;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace gme
