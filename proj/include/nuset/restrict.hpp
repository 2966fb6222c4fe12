#pragma once

// Face restrictions on value trees.
//
//   restr_frame(n, 0, q, e, *)            = *
//   restr_frame(n, p+1, q, e, (d, l))     = (restr_frame(n, p, q+1, e, d), restr_layer(n-1, p, q, e, l))
//   restr_layer(n, p, q, e, l)            = w |-> restr_painting(n, p, q, e, l[w])
//   restr_painting(n, p, 0, e, {l; c})    = l[e]
//   restr_painting(n, p, q+1, e, {l; c})  = {restr_layer(n-1, p, q, e, l); restr_painting(n, p+1, q, e, c)}
//
// restr_frame maps frame^{n+1,p} to frame^{n,p} and restr_painting maps
// painting^{n+1,p} to painting^{n,p}; both need q <= n-p. None of the
// equations look at the families E_k, so the operators are shared by the
// concrete model, the staged builder and the fibred bridge.

#include <algorithm>

#include "nuset/indices.hpp"
#include "nuset/value.hpp"

namespace nuset {

/// A deliberately corrupted restriction, used to check that the coherence
/// checkers notice broken face maps. The corruption fires only at the given
/// painting rank and face depth q (q < 0 means every depth).
struct RestrMutation {
  enum class Kind {
    none,
    /// restr_layer at the given rank returns its components in reverse direction order.
    swap_layer,
    /// restr_painting with q = 0 at the given rank extracts l[(e+1) mod nu] instead of l[e].
    shift_base,
    /// restr_frame reverses the direction order of the one layer it rebuilds at the given rank.
    swap_frame_layer,
  };
  Kind kind = Kind::none;
  int rank = 0;
  int q = -1;

  bool active() const { return kind != Kind::none; }
  bool fires(Kind k, int p, int depth) const { return kind == k && rank == p && (q < 0 || q == depth); }
};

inline std::string to_string(const RestrMutation& m) {
  std::string site = "@" + std::to_string(m.rank) + (m.q < 0 ? std::string() : ",q" + std::to_string(m.q));
  switch (m.kind) {
  case RestrMutation::Kind::none: return "none";
  case RestrMutation::Kind::swap_layer: return "swap_layer" + site;
  case RestrMutation::Kind::shift_base: return "shift_base" + site;
  case RestrMutation::Kind::swap_frame_layer: return "swap_frame_layer" + site;
  }
  return "?";
}

class Restrictor {
public:
  explicit Restrictor(Arity nu, RestrMutation mutation = {}) : nu_(nu.value()), mutation_(mutation) {}

  int nu() const { return nu_; }
  const RestrMutation& mutation() const { return mutation_; }
  /// How many times the mutation has changed a result so far. Firing on a
  /// layer whose reversal is itself does not count.
  std::size_t mutation_hits() const { return hits_; }

  /// restr_frame^{n,p}_{q,eps}: frame^{n+1,p} -> frame^{n,p}, with shape and range checks.
  Frame frame(int n, int p, FaceIndex f, const Frame& d) const {
    require_face(n, p, nu_, f);
    check_frame_shape(d, nu_, n + 1, p);
    return frame_raw(n, p, f.q, f.eps, d);
  }

  /// restr_painting^{n,p}_{q,eps}: painting^{n+1,p}(d) -> painting^{n,p}(restr_frame(d)).
  Painting painting(int n, int p, FaceIndex f, const Painting& c) const {
    require_face(n, p, nu_, f);
    check_painting_shape(c, nu_, n + 1, p);
    return painting_raw(n, p, f.q, f.eps, c);
  }

  /// Unchecked variants for callers that validated shapes once up front.
  Frame frame_raw(int n, int p, int q, int eps, const Frame& d) const {
    if (p == 0) return Frame::star();
    Layer top = layer_raw(n - 1, p - 1, q, eps, d.top());
    if (mutation_.fires(RestrMutation::Kind::swap_frame_layer, p - 1, q)) reverse_counted(top);
    return Frame::extend(frame_raw(n, p - 1, q + 1, eps, d.prefix()), std::move(top));
  }

  Layer layer_raw(int n, int p, int q, int eps, const Layer& l) const {
    Layer out;
    out.parts.reserve(l.size());
    for (const auto& part : l.parts) out.parts.push_back(painting_raw(n, p, q, eps, part));
    if (mutation_.fires(RestrMutation::Kind::swap_layer, p, q)) reverse_counted(out);
    return out;
  }

  Painting painting_raw(int n, int p, int q, int eps, const Painting& c) const {
    if (q == 0) {
      int e = eps;
      if (mutation_.fires(RestrMutation::Kind::shift_base, p, q)) {
        e = (eps + 1) % nu_;
        if (!(c.layer()[static_cast<std::size_t>(e)] == c.layer()[static_cast<std::size_t>(eps)])) ++hits_;
      }
      return c.layer()[static_cast<std::size_t>(e)];
    }
    return Painting::layered(layer_raw(n - 1, p, q - 1, eps, c.layer()), painting_raw(n, p + 1, q - 1, eps, c.rest()));
  }

private:
  void reverse_counted(Layer& l) const {
    Layer before = l;
    std::reverse(l.parts.begin(), l.parts.end());
    if (!(l == before)) ++hits_;
  }

  int nu_;
  RestrMutation mutation_;
  mutable std::size_t hits_ = 0;
};

} // namespace nuset
