#pragma once

// Finite-set semantics of truncated nu-sets: enumeration of frames and
// paintings, face evaluation, coherence checks and validation.

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nuset/error.hpp"
#include "nuset/indices.hpp"
#include "nuset/restrict.hpp"
#include "nuset/value.hpp"

namespace nuset {

/// E_n: canonical fullframe key -> sorted, duplicate-free element labels.
struct LevelFamily {
  int level = 0;
  std::map<std::string, std::vector<std::string>> fibers;

  const std::vector<std::string>* fiber(const std::string& key) const {
    auto it = fibers.find(key);
    return it == fibers.end() ? nullptr : &it->second;
  }

  std::size_t element_count() const {
    std::size_t total = 0;
    for (const auto& [key, labels] : fibers) total += labels.size();
    return total;
  }

  friend bool operator==(const LevelFamily&, const LevelFamily&) = default;
};

/// D : nuSet^{<n}, the families E_0 .. E_{n-1}.
class TruncatedNuSet {
public:
  explicit TruncatedNuSet(Arity nu, std::vector<LevelFamily> levels = {}) : nu_(nu), levels_(std::move(levels)) {}

  Arity nu() const { return nu_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  const std::vector<LevelFamily>& levels() const { return levels_; }
  const LevelFamily& level(int k) const {
    if (k < 0 || k >= depth())
      throw DataError("level " + std::to_string(k) + " not present (depth " + std::to_string(depth()) + ")");
    return levels_[static_cast<std::size_t>(k)];
  }

  void push_level(LevelFamily family) { levels_.push_back(std::move(family)); }

  /// The truncation E_0 .. E_{n-1}.
  TruncatedNuSet prefix(int n) const {
    if (n < 0 || n > depth()) throw DataError("prefix(" + std::to_string(n) + ") beyond depth " + std::to_string(depth()));
    return TruncatedNuSet(nu_, std::vector<LevelFamily>(levels_.begin(), levels_.begin() + n));
  }

  friend bool operator==(const TruncatedNuSet& a, const TruncatedNuSet& b) {
    return a.nu_ == b.nu_ && a.levels_ == b.levels_;
  }

private:
  Arity nu_;
  std::vector<LevelFamily> levels_;
};

/// Memoized enumeration of frame^{n,p} and painting^{n,p}(d) for one D.
///
/// Every returned list is sorted by canonical key and never changes once
/// computed. Not safe for concurrent use while tables are still being filled;
/// share the results, not the enumerator.
class Enumerator {
public:
  explicit Enumerator(TruncatedNuSet D) : D_(std::make_shared<const TruncatedNuSet>(std::move(D))), restr_(D_->nu()) {}

  const TruncatedNuSet& data() const { return *D_; }
  int nu() const { return D_->nu().value(); }

  /// frame^{n,p}(D); needs E_0 .. E_{n-1} when p > 0.
  const std::vector<Frame>& frames(int n, int p) {
    require_rank(n, p);
    if (p > 0 && D_->depth() < n)
      throw DataError("frames at level " + std::to_string(n) + " need " + std::to_string(n) + " levels, have " +
                      std::to_string(D_->depth()));
    auto key = std::make_pair(n, p);
    if (auto it = frames_.find(key); it != frames_.end()) return it->second.list;

    FrameTable table;
    if (p == 0) {
      table.list.push_back(Frame::star());
    } else {
      // Copy: the recursive calls below may insert into frames_.
      std::vector<Frame> prefixes = frames(n, p - 1);
      for (const Frame& d : prefixes)
        for (Layer& l : layers(n - 1, p - 1, d)) table.list.push_back(Frame::extend(d, std::move(l)));
    }
    std::sort(table.list.begin(), table.list.end());
    for (const auto& f : table.list) table.keys.insert(f.key());
    return frames_.emplace(key, std::move(table)).first->second.list;
  }

  const std::vector<Frame>& fullframes(int n) { return frames(n, n); }

  /// layer^{m,p}(d) for d in frame^{m+1,p}: all nu-tuples of paintings over the faces restr_{0,eps}(d).
  std::vector<Layer> layers(int m, int p, const Frame& d) {
    std::vector<Layer> out{Layer{}};
    for (int eps = 0; eps < nu(); ++eps) {
      Frame face = restr_.frame_raw(m, p, 0, eps, d);
      const std::vector<Painting>& options = paintings(m, p, face);
      std::vector<Layer> next;
      next.reserve(out.size() * options.size());
      for (const Layer& partial : out)
        for (const Painting& c : options) {
          Layer l = partial;
          l.parts.push_back(c);
          next.push_back(std::move(l));
        }
      out = std::move(next);
    }
    return out;
  }

  /// painting^{n,p}(E_n)(d); needs E_0 .. E_n. At p = n this is the fiber E_n(d).
  const std::vector<Painting>& paintings(int n, int p, const Frame& d) {
    require_rank(n, p);
    if (D_->depth() <= n)
      throw DataError("paintings at level " + std::to_string(n) + " need " + std::to_string(n + 1) + " levels, have " +
                      std::to_string(D_->depth()));
    std::string memo_key = std::to_string(n) + "|" + std::to_string(p) + "|" + d.key();
    if (auto it = paintings_.find(memo_key); it != paintings_.end()) return it->second;

    std::vector<Painting> out;
    if (p == n) {
      const auto* fiber = D_->level(n).fiber(d.key());
      if (!fiber) throw DataError("level " + std::to_string(n) + " has no fiber for frame key " + d.key());
      for (const auto& label : *fiber) out.push_back(Painting::top(label));
    } else {
      for (Layer& l : layers(n - 1, p, d)) {
        Frame extended = Frame::extend(d, l);
        // Copy for the same reason as in frames().
        std::vector<Painting> rests = paintings(n, p + 1, extended);
        for (const Painting& c : rests) out.push_back(Painting::layered(l, c));
      }
    }
    std::sort(out.begin(), out.end());
    return paintings_.emplace(std::move(memo_key), std::move(out)).first->second;
  }

  /// All paintings of rank p at level n, over every frame of rank p.
  std::vector<Painting> all_paintings(int n, int p) {
    std::vector<Painting> out;
    std::vector<Frame> base = frames(n, p);
    for (const Frame& d : base) {
      const auto& ps = paintings(n, p, d);
      out.insert(out.end(), ps.begin(), ps.end());
    }
    return out;
  }

  /// Total cells X_n = painting^{n,0}(*).
  const std::vector<Painting>& cells(int n) { return paintings(n, 0, Frame::star()); }

  bool has_frame(int n, int p, const Frame& d) {
    frames(n, p);
    return frames_.at({n, p}).keys.count(d.key()) > 0;
  }

  bool has_painting(int n, int p, const Frame& d, const Painting& c) {
    if (!has_frame(n, p, d)) return false;
    const auto& ps = paintings(n, p, d);
    return std::binary_search(ps.begin(), ps.end(), c);
  }

private:
  struct FrameTable {
    std::vector<Frame> list;
    std::unordered_set<std::string> keys;
  };

  std::shared_ptr<const TruncatedNuSet> D_;
  Restrictor restr_;
  std::map<std::pair<int, int>, FrameTable> frames_;
  std::unordered_map<std::string, std::vector<Painting>> paintings_;
};

inline std::vector<Frame> enumerate_frames(const TruncatedNuSet& D, int n, int p) {
  Enumerator en(D);
  return en.frames(n, p);
}

inline std::vector<Frame> enumerate_fullframe(const TruncatedNuSet& D, int n) { return enumerate_frames(D, n, n); }

inline std::vector<Painting> enumerate_paintings(const TruncatedNuSet& D, int n, int p, const Frame& d) {
  Enumerator en(D);
  if (!en.has_frame(n, p, d)) throw DataError("not a frame of rank " + std::to_string(p) + " at level " +
                                              std::to_string(n) + ": " + d.key());
  return en.paintings(n, p, d);
}

/// restr_frame^{n,p}_{q,eps} on a frame of rank p at level n+1.
inline Frame eval_restr_frame(Arity nu, int n, int p, FaceIndex f, const Frame& d) {
  return Restrictor(nu).frame(n, p, f, d);
}

/// restr_painting^{n,p}_{q,eps} on a painting of rank p at level n+1.
inline Painting eval_restr_painting(Arity nu, int n, int p, FaceIndex f, const Painting& c) {
  return Restrictor(nu).painting(n, p, f, c);
}

/// Both sides of the frame commutation law on d : frame^{n+2,p}.
inline std::pair<Frame, Frame> coh_frame_sides(const Restrictor& R, int n, int p, const CohIndex& c, const Frame& d) {
  Frame lhs = R.frame_raw(n, p, c.q, c.eps, R.frame_raw(n + 1, p, c.r, c.omega, d));
  Frame rhs = R.frame_raw(n, p, c.r, c.omega, R.frame_raw(n + 1, p, c.q + 1, c.eps, d));
  return {std::move(lhs), std::move(rhs)};
}

/// Both sides of the painting commutation law on c : painting^{n+2,p}.
inline std::pair<Painting, Painting> coh_painting_sides(const Restrictor& R, int n, int p, const CohIndex& c,
                                                        const Painting& x) {
  Painting lhs = R.painting_raw(n, p, c.q, c.eps, R.painting_raw(n + 1, p, c.r, c.omega, x));
  Painting rhs = R.painting_raw(n, p, c.r, c.omega, R.painting_raw(n + 1, p, c.q + 1, c.eps, x));
  return {std::move(lhs), std::move(rhs)};
}

inline bool check_coh_frame(const Restrictor& R, int n, int p, const CohIndex& c, const Frame& d) {
  require_coh(n, p, R.nu(), c);
  check_frame_shape(d, R.nu(), n + 2, p);
  auto [lhs, rhs] = coh_frame_sides(R, n, p, c, d);
  return lhs == rhs;
}

inline bool check_coh_frame(Arity nu, int n, int p, const CohIndex& c, const Frame& d) {
  return check_coh_frame(Restrictor(nu), n, p, c, d);
}

/// The painting law; the two sides live over frames identified by the frame
/// law, so that law is checked on the underlying frame as well.
inline bool check_coh_painting(const Restrictor& R, int n, int p, const CohIndex& c, const Frame& d, const Painting& x) {
  require_coh(n, p, R.nu(), c);
  check_frame_shape(d, R.nu(), n + 2, p);
  check_painting_shape(x, R.nu(), n + 2, p);
  auto [flhs, frhs] = coh_frame_sides(R, n, p, c, d);
  if (!(flhs == frhs)) return false;
  auto [lhs, rhs] = coh_painting_sides(R, n, p, c, x);
  return lhs == rhs;
}

inline bool check_coh_painting(Arity nu, int n, int p, const CohIndex& c, const Frame& d, const Painting& x) {
  return check_coh_painting(Restrictor(nu), n, p, c, d, x);
}

/// Counters and failures of a sweep over enumerated values.
struct SweepResult {
  std::size_t frame_checks = 0;
  std::size_t painting_checks = 0;
  std::size_t membership_checks = 0;
  std::size_t failure_count = 0;
  std::vector<std::string> failures;  // first few, for reporting

  bool ok() const { return failure_count == 0; }
  std::size_t total() const { return frame_checks + painting_checks + membership_checks; }

  void fail(std::string what) {
    ++failure_count;
    if (failures.size() < 16) failures.push_back(std::move(what));
  }
  void merge(const SweepResult& o) {
    frame_checks += o.frame_checks;
    painting_checks += o.painting_checks;
    membership_checks += o.membership_checks;
    failure_count += o.failure_count;
    for (const auto& f : o.failures)
      if (failures.size() < 16) failures.push_back(f);
  }
};

/// coh_frame^{n,p} for every rank p <= n, every coherence tuple and every
/// enumerated d : frame^{n+2,p}.
inline SweepResult sweep_coh_frame(Enumerator& en, const Restrictor& R, int n) {
  SweepResult out;
  for (int p = 0; p <= n; ++p) {
    const auto& ds = en.frames(n + 2, p);
    for (const CohIndex& c : coh_indices(n, p, Arity(R.nu())))
      for (const Frame& d : ds) {
        ++out.frame_checks;
        auto [lhs, rhs] = coh_frame_sides(R, n, p, c, d);
        if (!(lhs == rhs))
          out.fail("coh_frame n=" + std::to_string(n) + " p=" + std::to_string(p) + " " + to_string(c) + " on " + d.key());
      }
  }
  return out;
}

/// coh_painting^{n,p} for every rank p <= n over every enumerated painting at level n+2.
inline SweepResult sweep_coh_painting(Enumerator& en, const Restrictor& R, int n) {
  SweepResult out;
  for (int p = 0; p <= n; ++p) {
    const std::vector<Frame> ds = en.frames(n + 2, p);
    const auto idx = coh_indices(n, p, Arity(R.nu()));
    for (const Frame& d : ds) {
      const std::vector<Painting> xs = en.paintings(n + 2, p, d);
      for (const CohIndex& c : idx) {
        auto [flhs, frhs] = coh_frame_sides(R, n, p, c, d);
        bool frames_agree = flhs == frhs;
        for (const Painting& x : xs) {
          ++out.painting_checks;
          auto [lhs, rhs] = coh_painting_sides(R, n, p, c, x);
          if (!frames_agree || !(lhs == rhs))
            out.fail("coh_painting n=" + std::to_string(n) + " p=" + std::to_string(p) + " " + to_string(c) + " on " +
                     x.key());
        }
      }
    }
  }
  return out;
}

/// Every face of every frame at level n+1 lands in frame^{n,p}.
inline SweepResult sweep_frame_membership(Enumerator& en, const Restrictor& R, int n) {
  SweepResult out;
  for (int p = 0; p <= n; ++p) {
    const std::vector<Frame> ds = en.frames(n + 1, p);
    for (const FaceIndex& f : face_indices(n, p, Arity(R.nu())))
      for (const Frame& d : ds) {
        ++out.membership_checks;
        Frame face = R.frame_raw(n, p, f.q, f.eps, d);
        if (!en.has_frame(n, p, face))
          out.fail("restr_frame n=" + std::to_string(n) + " p=" + std::to_string(p) + " " + to_string(f) + " of " +
                   d.key() + " left frame^{n,p}");
      }
  }
  return out;
}

/// Every face of every painting at level n+1 lands among the paintings over the face frame.
inline SweepResult sweep_painting_membership(Enumerator& en, const Restrictor& R, int n) {
  SweepResult out;
  for (int p = 0; p <= n; ++p) {
    const std::vector<Frame> ds = en.frames(n + 1, p);
    for (const Frame& d : ds) {
      const std::vector<Painting> xs = en.paintings(n + 1, p, d);
      for (const FaceIndex& f : face_indices(n, p, Arity(R.nu()))) {
        Frame face = R.frame_raw(n, p, f.q, f.eps, d);
        for (const Painting& x : xs) {
          ++out.membership_checks;
          Painting img = R.painting_raw(n, p, f.q, f.eps, x);
          if (!en.has_painting(n, p, face, img))
            out.fail("restr_painting n=" + std::to_string(n) + " p=" + std::to_string(p) + " " + to_string(f) + " of " +
                     x.key() + " left painting^{n,p}");
        }
      }
    }
  }
  return out;
}

/// Coherence and membership over everything enumerable from D without
/// going past its top level: frames and paintings up to level depth-1.
inline SweepResult sweep_all(Enumerator& en, const Restrictor& R) {
  SweepResult out;
  int top = en.data().depth() - 1;
  for (int m = 1; m <= top; ++m) {
    out.merge(sweep_frame_membership(en, R, m - 1));
    out.merge(sweep_painting_membership(en, R, m - 1));
  }
  for (int m = 2; m <= top; ++m) {
    out.merge(sweep_coh_frame(en, R, m - 2));
    out.merge(sweep_coh_painting(en, R, m - 2));
  }
  return out;
}

struct LevelIssue {
  int level = 0;
  std::string kind;  // "level-index", "label", "missing-key", "extra-key", "malformed-key", "enumeration"
  std::string detail;
};

struct ValidationReport {
  std::vector<LevelIssue> issues;
  SweepResult sweep;
  int levels_checked = 0;

  bool valid() const { return issues.empty() && sweep.ok(); }

  std::string render() const {
    std::ostringstream os;
    for (const auto& i : issues) os << "level " << i.level << ": " << i.kind << ": " << i.detail << "\n";
    for (const auto& f : sweep.failures) os << "sweep: " << f << "\n";
    if (sweep.failure_count > sweep.failures.size())
      os << "sweep: ... " << (sweep.failure_count - sweep.failures.size()) << " more failures\n";
    return os.str();
  }
};

namespace detail {

inline void check_labels(const LevelFamily& fam, std::vector<LevelIssue>& issues) {
  for (const auto& [key, labels] : fam.fibers) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!is_valid_label(labels[i]))
        issues.push_back({fam.level, "label", "invalid label '" + labels[i] + "' in fiber " + key});
      if (i > 0 && !(labels[i - 1] < labels[i]))
        issues.push_back({fam.level, "label", "fiber " + key + " is not sorted and duplicate-free"});
    }
  }
}

} // namespace detail

/// Well-formedness of the telescope plus the coherence and membership sweep.
/// Stops at the first level whose key set is wrong, since nothing above it can be enumerated.
inline ValidationReport validate(const TruncatedNuSet& D, const Restrictor* restrictor = nullptr) {
  ValidationReport report;
  Enumerator en(D);
  for (int k = 0; k < D.depth(); ++k) {
    const LevelFamily& fam = D.level(k);
    std::size_t before = report.issues.size();
    if (fam.level != k)
      report.issues.push_back({k, "level-index", "family at position " + std::to_string(k) + " declares level " +
                                                     std::to_string(fam.level)});
    detail::check_labels(fam, report.issues);

    std::vector<Frame> expected;
    try {
      expected = en.fullframes(k);
    } catch (const Error& e) {
      report.issues.push_back({k, "enumeration", e.what()});
      break;
    }
    std::set<std::string> want;
    for (const auto& f : expected) want.insert(f.key());
    for (const auto& key : want)
      if (!fam.fibers.count(key)) report.issues.push_back({k, "missing-key", key});
    for (const auto& [key, labels] : fam.fibers)
      if (!want.count(key)) {
        bool parses = true;
        try {
          parse_frame_key(key);
        } catch (const DataError&) {
          parses = false;
        }
        report.issues.push_back({k, parses ? "extra-key" : "malformed-key", key});
      }
    if (report.issues.size() != before) break;
    report.levels_checked = k + 1;
  }
  if (report.issues.empty()) {
    Restrictor plain(D.nu());
    report.sweep = sweep_all(en, restrictor ? *restrictor : plain);
  }
  return report;
}

} // namespace nuset
