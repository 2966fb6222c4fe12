#pragma once

#include <compare>
#include <string>
#include <vector>

#include "nuset/error.hpp"

namespace nuset {

/// Number of directions per layer: 1 gives augmented semi-simplicial sets,
/// 2 gives semi-cubical sets.
class Arity {
public:
  explicit Arity(int nu) : nu_(nu) {
    if (nu < 1) throw IndexError("arity must be at least 1, got " + std::to_string(nu));
  }
  int value() const { return nu_; }
  operator int() const { return nu_; }
  auto operator<=>(const Arity&) const = default;

private:
  int nu_;
};

/// A face (q, eps): depth q of the restriction, direction eps in [0, nu).
struct FaceIndex {
  int q = 0;
  int eps = 0;
  auto operator<=>(const FaceIndex&) const = default;
};

/// A coherence tuple (q, r, eps, omega) with r <= q.
struct CohIndex {
  int q = 0;
  int r = 0;
  int eps = 0;
  int omega = 0;
  auto operator<=>(const CohIndex&) const = default;
};

inline std::string to_string(const FaceIndex& f) {
  return "(q=" + std::to_string(f.q) + ",eps=" + std::to_string(f.eps) + ")";
}

inline std::string to_string(const CohIndex& c) {
  return "(q=" + std::to_string(c.q) + ",r=" + std::to_string(c.r) + ",eps=" + std::to_string(c.eps) +
         ",omega=" + std::to_string(c.omega) + ")";
}

inline void require_rank(int n, int p) {
  if (n < 0 || p < 0 || p > n)
    throw IndexError("rank out of range: need 0 <= p <= n, got n=" + std::to_string(n) + ", p=" + std::to_string(p));
}

inline void require_face(int n, int p, int nu, const FaceIndex& f) {
  require_rank(n, p);
  if (f.q < 0 || f.q > n - p)
    throw IndexError("face depth out of range: need 0 <= q <= n-p = " + std::to_string(n - p) + ", got q=" +
                     std::to_string(f.q));
  if (f.eps < 0 || f.eps >= nu)
    throw IndexError("direction out of range: need 0 <= eps < " + std::to_string(nu) + ", got " + std::to_string(f.eps));
}

inline void require_coh(int n, int p, int nu, const CohIndex& c) {
  require_rank(n, p);
  if (c.r < 0 || c.r > c.q || c.q > n - p)
    throw IndexError("coherence indices out of range: need 0 <= r <= q <= n-p = " + std::to_string(n - p) + ", got " +
                     to_string(c));
  if (c.eps < 0 || c.eps >= nu || c.omega < 0 || c.omega >= nu)
    throw IndexError("coherence directions out of range for nu=" + std::to_string(nu) + ": " + to_string(c));
}

/// All faces (q, eps) with q <= n-p, in lexicographic order.
inline std::vector<FaceIndex> face_indices(int n, int p, Arity nu) {
  require_rank(n, p);
  std::vector<FaceIndex> out;
  out.reserve(static_cast<std::size_t>(nu.value() * (n - p + 1)));
  for (int q = 0; q <= n - p; ++q)
    for (int eps = 0; eps < nu.value(); ++eps) out.push_back({q, eps});
  return out;
}

/// All coherence tuples with r <= q <= n-p, in lexicographic (q, r, eps, omega) order.
inline std::vector<CohIndex> coh_indices(int n, int p, Arity nu) {
  require_rank(n, p);
  std::vector<CohIndex> out;
  for (int q = 0; q <= n - p; ++q)
    for (int r = 0; r <= q; ++r)
      for (int eps = 0; eps < nu.value(); ++eps)
        for (int omega = 0; omega < nu.value(); ++omega) out.push_back({q, r, eps, omega});
  return out;
}

} // namespace nuset
