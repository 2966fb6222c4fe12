#pragma once

// Cells with face maps, and the passage to and from indexed families.
//
// X_n is the set of total cells painting^{n,0}(*); the face ∂_{q,e} : X_n ->
// X_{n-1} (q < n) is restr_painting at rank 0. For ν = 2 an n-cell has the 2n
// facets of a cube; for ν = 1 dimension n holds the (n-1)-simplices, X_0
// being the augmentation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nuset/concrete.hpp"
#include "nuset/error.hpp"
#include "nuset/indices.hpp"
#include "nuset/restrict.hpp"
#include "nuset/value.hpp"

namespace nuset {

struct FibredSet {
  int nu = 1;
  std::vector<std::vector<std::string>> cells;  // per dimension, duplicate-free
  /// faces[n][{q,e}][i] is the index in cells[n-1] of ∂_{q,e} of cells[n][i]; faces[0] is empty.
  std::vector<std::map<FaceIndex, std::vector<std::uint32_t>>> faces;

  int dims() const { return static_cast<int>(cells.size()); }
  std::size_t count(int n) const { return cells.at(static_cast<std::size_t>(n)).size(); }
  std::uint32_t face(int n, FaceIndex f, std::uint32_t i) const {
    return faces.at(static_cast<std::size_t>(n)).at(f).at(i);
  }

  friend bool operator==(const FibredSet&, const FibredSet&) = default;
};

struct IdentityReport {
  std::size_t checks = 0;
  std::vector<std::string> violations;  // first few
  std::size_t violation_count = 0;

  bool ok() const { return violation_count == 0; }
  void fail(std::string what) {
    ++violation_count;
    if (violations.size() < 32) violations.push_back(std::move(what));
  }
  std::string render() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v << "\n";
    if (violation_count > violations.size()) os << "... " << (violation_count - violations.size()) << " more\n";
    return os.str();
  }
};

/// Shape of the data: ids valid and unique, face tables total and in range.
inline IdentityReport check_structure(const FibredSet& X) {
  IdentityReport r;
  if (X.nu < 1) r.fail("nu must be >= 1");
  if (X.faces.size() != X.cells.size()) r.fail("face tables do not match the number of dimensions");
  for (int n = 0; n < X.dims(); ++n) {
    std::set<std::string> seen;
    for (const auto& id : X.cells[static_cast<std::size_t>(n)]) {
      if (!is_valid_label(id)) r.fail("dimension " + std::to_string(n) + ": invalid cell id '" + id + "'");
      if (!seen.insert(id).second) r.fail("dimension " + std::to_string(n) + ": duplicate cell id '" + id + "'");
    }
    if (n >= static_cast<int>(X.faces.size())) continue;
    const auto& table = X.faces[static_cast<std::size_t>(n)];
    std::set<FaceIndex> want;
    for (int q = 0; q < n; ++q)
      for (int e = 0; e < X.nu; ++e) want.insert(FaceIndex{q, e});
    for (const auto& [f, tab] : table)
      if (!want.count(f)) r.fail("dimension " + std::to_string(n) + ": face " + to_string(f) + " is out of range");
    for (const FaceIndex& f : want) {
      auto it = table.find(f);
      if (it == table.end() || it->second.size() != X.count(n)) {
        r.fail("dimension " + std::to_string(n) + ": face " + to_string(f) + " is not total");
        continue;
      }
      for (std::size_t i = 0; i < it->second.size(); ++i)
        if (it->second[i] >= X.count(n - 1))
          r.fail("dimension " + std::to_string(n) + ": face " + to_string(f) + " of " + X.cells[static_cast<std::size_t>(n)][i] +
                 " points outside dimension " + std::to_string(n - 1));
    }
  }
  return r;
}

/// ∂_{q,e} ∂_{r,w} = ∂_{r,w} ∂_{q+1,e} for r <= q, on every cell of dimension >= 2.
inline IdentityReport check_identities(const FibredSet& X) {
  IdentityReport r = check_structure(X);
  if (!r.ok()) return r;
  for (int n = 2; n < X.dims(); ++n)
    for (std::uint32_t i = 0; i < X.count(n); ++i)
      for (int q = 0; q <= n - 2; ++q)
        for (int rr = 0; rr <= q; ++rr)
          for (int e = 0; e < X.nu; ++e)
            for (int w = 0; w < X.nu; ++w) {
              ++r.checks;
              auto lhs = X.face(n - 1, {q, e}, X.face(n, {rr, w}, i));
              auto rhs = X.face(n - 1, {rr, w}, X.face(n, {q + 1, e}, i));
              if (lhs != rhs)
                r.fail("cell " + X.cells[static_cast<std::size_t>(n)][i] + " (dimension " + std::to_string(n) + "): d" +
                       std::to_string(q) + "," + std::to_string(e) + " d" + std::to_string(rr) + "," + std::to_string(w) +
                       " = " + X.cells[static_cast<std::size_t>(n - 2)][lhs] + " but d" + std::to_string(rr) + "," +
                       std::to_string(w) + " d" + std::to_string(q + 1) + "," + std::to_string(e) + " = " +
                       X.cells[static_cast<std::size_t>(n - 2)][rhs]);
            }
  return r;
}

/// Cells of D with their faces. A cell is named by its element label when the
/// labels of its dimension are pairwise distinct, and x<n>_<i> otherwise.
inline FibredSet to_fibred(const TruncatedNuSet& D) {
  Enumerator en(D);
  Restrictor R(D.nu());
  FibredSet X;
  X.nu = D.nu().value();
  std::vector<std::vector<Painting>> total;
  for (int n = 0; n < D.depth(); ++n) {
    const std::vector<Painting> cs = en.cells(n);
    std::vector<std::string> ids;
    std::set<std::string> labels;
    for (const Painting& c : cs) labels.insert(split_total_cell(c).second);
    bool distinct = labels.size() == cs.size();
    for (std::size_t i = 0; i < cs.size(); ++i)
      ids.push_back(distinct ? split_total_cell(cs[i]).second : "x" + std::to_string(n) + "_" + std::to_string(i));
    std::map<FaceIndex, std::vector<std::uint32_t>> table;
    for (const FaceIndex& f : n == 0 ? std::vector<FaceIndex>{} : face_indices(n - 1, 0, D.nu())) {
      auto& tab = table[f];
      const auto& below = total[static_cast<std::size_t>(n - 1)];
      for (const Painting& c : cs) {
        Painting img = R.painting(n - 1, 0, f, c);
        auto it = std::lower_bound(below.begin(), below.end(), img);
        if (it == below.end() || !(*it == img)) throw DataError("face of " + c.key() + " is not a cell");
        tab.push_back(static_cast<std::uint32_t>(it - below.begin()));
      }
    }
    X.cells.push_back(std::move(ids));
    X.faces.push_back(std::move(table));
    total.push_back(cs);
  }
  return X;
}

namespace detail {

/// A painting of rank 0 with its first k layers removed.
inline Painting drop_layers(const Painting& c, int k) {
  Painting out = c;
  for (int i = 0; i < k; ++i) out = out.rest();
  return out;
}

} // namespace detail

/// Rebuilds the indexed families: E_n(d) holds the n-cells whose boundary is d.
/// Layer p, direction e of a cell's boundary comes from its face ∂_{p,e}; every
/// face is then re-derived from the assembled cell and compared.
inline TruncatedNuSet to_indexed(const FibredSet& X) {
  IdentityReport ids = check_identities(X);
  if (!ids.ok()) throw DataError("face identities fail: " + ids.violations.front());
  TruncatedNuSet D{Arity(X.nu)};
  Restrictor R{Arity(X.nu)};
  std::vector<std::vector<Painting>> total;  // per dimension, by cell index
  for (int n = 0; n < X.dims(); ++n) {
    const auto& names = X.cells[static_cast<std::size_t>(n)];
    std::vector<Painting> cells;
    LevelFamily E;
    E.level = n;
    for (const Frame& d : enumerate_fullframe(D, n)) E.fibers[d.key()];
    for (std::uint32_t i = 0; i < names.size(); ++i) {
      Frame d;
      for (int p = 0; p < n; ++p) {
        Layer l;
        for (int e = 0; e < X.nu; ++e)
          l.parts.push_back(detail::drop_layers(total[static_cast<std::size_t>(n - 1)][X.face(n, {p, e}, i)], p));
        d = Frame::extend(d, std::move(l));
      }
      if (!frame_has_shape(d, X.nu, n, n))
        throw DataError("cell " + names[i] + " (dimension " + std::to_string(n) + "): faces do not assemble into a boundary");
      Painting c = total_cell(d, names[i]);
      for (int q = 0; q < n; ++q)
        for (int e = 0; e < X.nu; ++e) {
          Painting want = total[static_cast<std::size_t>(n - 1)][X.face(n, {q, e}, i)];
          if (!(R.painting(n - 1, 0, {q, e}, c) == want))
            throw DataError("cell " + names[i] + " (dimension " + std::to_string(n) + "): face " + to_string(FaceIndex{q, e}) +
                            " disagrees with the boundary assembled from the other faces");
        }
      auto it = E.fibers.find(d.key());
      if (it == E.fibers.end())
        throw DataError("cell " + names[i] + " (dimension " + std::to_string(n) + "): boundary " + d.key() +
                        " is not a fullframe");
      it->second.push_back(names[i]);
      cells.push_back(std::move(c));
    }
    for (auto& [key, labels] : E.fibers) std::sort(labels.begin(), labels.end());
    D.push_level(std::move(E));
    total.push_back(std::move(cells));
  }
  return D;
}

namespace detail {

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Relabels both sides in a canonical order. Cells are coloured by iterated
/// refinement over faces and cofaces; colours are hashes of neighbourhoods, so
/// they are comparable between the sides. While a colour class has several
/// members, the first member on each side gets a colour of its own and
/// refinement resumes. Lower dimensions are split first: refinement alone does
/// not see that two faces of a cell coincide.
inline std::pair<FibredSet, FibredSet> canonical_pair(const FibredSet& A, const FibredSet& B) {
  const FibredSet* side[2] = {&A, &B};
  // colour[s][n][i]
  std::vector<std::vector<std::vector<std::uint64_t>>> colour(2);
  for (int s = 0; s < 2; ++s) {
    colour[s].resize(static_cast<std::size_t>(side[s]->dims()));
    for (int n = 0; n < side[s]->dims(); ++n)
      colour[s][static_cast<std::size_t>(n)].assign(side[s]->count(n), mix(static_cast<std::uint64_t>(n)));
  }
  auto count_classes = [&] {
    std::unordered_set<std::uint64_t> seen;
    for (int s = 0; s < 2; ++s)
      for (const auto& cn : colour[s]) seen.insert(cn.begin(), cn.end());
    return seen.size();
  };
  auto refine = [&] {
    std::size_t classes = count_classes();
    for (;;) {
      for (int s = 0; s < 2; ++s) {
        const FibredSet& X = *side[s];
        auto next = colour[s];
        for (int n = 0; n < X.dims(); ++n) {
          auto& out = next[static_cast<std::size_t>(n)];
          const auto& below = n > 0 ? colour[s][static_cast<std::size_t>(n - 1)] : out;
          for (const auto& [f, tab] : X.faces[static_cast<std::size_t>(n)])
            for (std::uint32_t i = 0; i < tab.size(); ++i) out[i] = mix(out[i] ^ below[tab[i]]);
          if (n + 1 < X.dims()) {
            std::vector<std::uint64_t> co(X.count(n), 0);
            const auto& above = colour[s][static_cast<std::size_t>(n + 1)];
            for (const auto& [f, tab] : X.faces[static_cast<std::size_t>(n + 1)]) {
              std::uint64_t tag = mix(static_cast<std::uint64_t>(f.q) << 32 | static_cast<std::uint64_t>(f.eps));
              for (std::uint32_t j = 0; j < tab.size(); ++j) co[tab[j]] += mix(tag ^ above[j]);
            }
            for (std::uint32_t i = 0; i < X.count(n); ++i) out[i] = mix(out[i] ^ co[i]);
          }
        }
        colour[s] = std::move(next);
      }
      std::size_t now = count_classes();
      if (now == classes) return;
      classes = now;
    }
  };

  for (std::uint64_t round = 1;; ++round) {
    refine();
    std::optional<std::uint64_t> tie;
    for (const auto& cn : colour[0]) {
      std::unordered_map<std::uint64_t, int> members;
      for (std::uint64_t c : cn) ++members[c];
      for (const auto& [c, k] : members)
        if (k > 1 && (!tie || c < *tie)) tie = c;
      if (tie) break;
    }
    if (!tie) break;
    for (int s = 0; s < 2; ++s) {
      bool done = false;
      for (std::size_t n = 0; n < colour[s].size() && !done; ++n)
        for (auto& x : colour[s][n])
          if (x == *tie) {
            x = mix(x ^ mix(round));
            done = true;
            break;
          }
    }
  }

  auto relabel = [&](int s) {
    const FibredSet& X = *side[s];
    FibredSet out;
    out.nu = X.nu;
    std::vector<std::vector<std::uint32_t>> pos(static_cast<std::size_t>(X.dims()));
    for (int n = 0; n < X.dims(); ++n) {
      std::vector<std::uint32_t> order(X.count(n));
      for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
      const auto& col = colour[s][static_cast<std::size_t>(n)];
      std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
      auto& pn = pos[static_cast<std::size_t>(n)];
      pn.assign(order.size(), 0);
      std::vector<std::string> names;
      for (std::uint32_t k = 0; k < order.size(); ++k) {
        pn[order[k]] = k;
        names.push_back("c" + std::to_string(k));
      }
      out.cells.push_back(std::move(names));
      std::map<FaceIndex, std::vector<std::uint32_t>> table;
      for (const auto& [f, tab] : X.faces[static_cast<std::size_t>(n)]) {
        auto& t = table[f];
        t.assign(tab.size(), 0);
        for (std::uint32_t i = 0; i < tab.size(); ++i) t[pn[i]] = pos[static_cast<std::size_t>(n - 1)][tab[i]];
      }
      out.faces.push_back(std::move(table));
    }
    return out;
  };
  return {relabel(0), relabel(1)};
}

} // namespace detail

/// True when the canonical relabelings coincide, which exhibits an
/// isomorphism. Structures whose symmetric cells are not told apart by
/// refinement can be reported as different even when isomorphic.
inline bool iso_check(const FibredSet& A, const FibredSet& B) {
  if (A.nu != B.nu || A.dims() != B.dims()) return false;
  for (int n = 0; n < A.dims(); ++n)
    if (A.count(n) != B.count(n)) return false;
  if (!check_structure(A).ok() || !check_structure(B).ok()) return false;
  auto [a, b] = detail::canonical_pair(A, B);
  return a == b;
}

inline bool iso_check(const TruncatedNuSet& A, const TruncatedNuSet& B) {
  if (A.nu() != B.nu() || A.depth() != B.depth()) return false;
  return iso_check(to_fibred(A), to_fibred(B));
}

/// Face relation as a graph: one node per cell, one labeled edge per face map.
inline std::string to_dot(const FibredSet& X) {
  std::ostringstream os;
  os << "digraph nuset {\n  rankdir=BT;\n";
  for (int n = 0; n < X.dims(); ++n)
    for (const auto& id : X.cells[static_cast<std::size_t>(n)])
      os << "  \"" << n << ":" << id << "\" [label=\"" << id << "\"];\n";
  for (int n = 1; n < X.dims(); ++n)
    for (const auto& [f, tab] : X.faces[static_cast<std::size_t>(n)])
      for (std::size_t i = 0; i < tab.size(); ++i)
        os << "  \"" << n << ":" << X.cells[static_cast<std::size_t>(n)][i] << "\" -> \"" << n - 1 << ":"
           << X.cells[static_cast<std::size_t>(n - 1)][tab[i]] << "\" [label=\"" << f.q << "," << f.eps << "\"];\n";
  os << "}\n";
  return os.str();
}

} // namespace nuset
