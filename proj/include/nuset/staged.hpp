#pragma once

// Level-by-level construction of a truncated ν-set, one stage at a time.
//
// A bundle at level n holds E_0 .. E_{n-1} and, for every level m <= n and
// rank p <= m, the materialized tables
//
//   frames      frame^{m,p}
//   paintings   painting^{m,p}(d) for each frame d        (m < n)
//   restr_frame restr_frame^{m-1,p}_{q,e} : frame^{m,p} -> frame^{m-1,p}
//   restr_painting  the same for paintings                (m < n)
//   coh_frame / coh_painting  certificates for the laws at m-2
//
// build_level consumes E_n and runs the ten stages below in order. Each stage
// checks what it consumes before producing anything, so a broken input is
// reported by the first stage that reads it.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "nuset/concrete.hpp"
#include "nuset/error.hpp"
#include "nuset/indices.hpp"
#include "nuset/restrict.hpp"
#include "nuset/value.hpp"

namespace nuset::staged {

enum class Stage {
  frame_spec,
  painting_spec,
  frame_and_restr_frame_spec,
  painting,
  restr_painting_spec,
  restr_frame_and_coh_frame_spec,
  restr_painting,
  coh_painting_spec,
  coh_frame,
  coh_painting,
};

inline constexpr std::array<Stage, 10> canonical_order = {
    Stage::frame_spec,          Stage::painting_spec,
    Stage::frame_and_restr_frame_spec, Stage::painting,
    Stage::restr_painting_spec, Stage::restr_frame_and_coh_frame_spec,
    Stage::restr_painting,      Stage::coh_painting_spec,
    Stage::coh_frame,           Stage::coh_painting,
};

inline const char* stage_name(Stage s) {
  switch (s) {
  case Stage::frame_spec: return "FRAME";
  case Stage::painting_spec: return "PAINTING";
  case Stage::frame_and_restr_frame_spec: return "frame+restr_FRAME";
  case Stage::painting: return "painting";
  case Stage::restr_painting_spec: return "restr_PAINTING";
  case Stage::restr_frame_and_coh_frame_spec: return "restr_frame+coh_FRAME";
  case Stage::restr_painting: return "restr_painting";
  case Stage::coh_painting_spec: return "coh_PAINTING";
  case Stage::coh_frame: return "coh_frame";
  case Stage::coh_painting: return "coh_painting";
  }
  return "?";
}

/// Stages whose output the given stage reads.
inline std::vector<Stage> prerequisites(Stage s) {
  switch (s) {
  case Stage::frame_spec:
  case Stage::painting_spec: return {};
  case Stage::frame_and_restr_frame_spec: return {Stage::frame_spec, Stage::painting_spec};
  case Stage::painting: return {Stage::frame_and_restr_frame_spec};
  case Stage::restr_painting_spec: return {Stage::painting};
  case Stage::restr_frame_and_coh_frame_spec: return {Stage::painting};
  case Stage::restr_painting: return {Stage::restr_painting_spec};
  case Stage::coh_painting_spec: return {Stage::restr_painting};
  case Stage::coh_frame: return {Stage::restr_frame_and_coh_frame_spec};
  case Stage::coh_painting: return {Stage::coh_painting_spec};
  }
  return {};
}

class StageError : public Error {
public:
  StageError(Stage stage, int level, const std::string& what)
      : Error("level " + std::to_string(level) + ", stage " + stage_name(stage) + ": " + what), stage_(stage),
        level_(level) {}
  Stage stage() const { return stage_; }
  int level() const { return level_; }

private:
  Stage stage_;
  int level_;
};

struct Certificate {
  std::size_t checks = 0;
  std::size_t failures = 0;
  bool ok() const { return failures == 0; }
  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct FrameTable {
  std::vector<Frame> list;  // sorted by key
  std::unordered_map<std::string, std::uint32_t> index;

  std::size_t size() const { return list.size(); }
  std::optional<std::uint32_t> find(const std::string& key) const {
    auto it = index.find(key);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  void assign(std::vector<Frame> frames) {
    std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) { return a.key() < b.key(); });
    list = std::move(frames);
    index.clear();
    index.reserve(list.size());
    for (std::uint32_t i = 0; i < list.size(); ++i) index.emplace(list[i].key(), i);
  }
};

struct RankTables {
  FrameTable frames;
  std::vector<std::vector<Painting>> paintings;  // per frame index, sorted
  std::map<FaceIndex, std::vector<std::uint32_t>> restr_frame;
  std::map<FaceIndex, std::vector<std::vector<std::uint32_t>>> restr_painting;  // [frame][painting] -> painting
  Certificate coh_frame;
  Certificate coh_painting;

  std::size_t painting_count() const {
    std::size_t s = 0;
    for (const auto& ps : paintings) s += ps.size();
    return s;
  }
};

struct LevelTables {
  std::vector<RankTables> ranks;  // p = 0 .. m
  bool painted = false;
};

struct StageBundle {
  int nu = 1;
  int level = 0;
  std::vector<LevelFamily> families;  // E_0 .. E_{level-1}
  std::vector<LevelTables> levels;    // 0 .. level
  std::vector<std::string> notes;

  TruncatedNuSet data() const { return TruncatedNuSet(Arity(nu), families); }

  const RankTables& at(int m, int p) const {
    return levels.at(static_cast<std::size_t>(m)).ranks.at(static_cast<std::size_t>(p));
  }
  RankTables& at(int m, int p) { return levels.at(static_cast<std::size_t>(m)).ranks.at(static_cast<std::size_t>(p)); }

  const std::vector<Frame>& fullframes() const { return at(level, level).frames.list; }

  /// How far the dependency bundles extend over the components of level k.
  std::string deps(int k) const {
    if (k < 0 || k > level) throw IndexError("deps: level out of range");
    switch (level - k) {
    case 0: return "DEPS_restr";
    case 1: return "DEPS_fullrestr";
    case 2: return "DEPS_fullcoh";
    default: return "DEPS_fullcoh2";
    }
  }

  bool certified() const {
    for (const auto& L : levels)
      for (const auto& r : L.ranks)
        if (!r.coh_frame.ok() || !r.coh_painting.ok()) return false;
    return true;
  }
};

inline bool same_tables(const StageBundle& a, const StageBundle& b) {
  if (a.nu != b.nu || a.level != b.level || a.families != b.families || a.levels.size() != b.levels.size())
    return false;
  for (std::size_t m = 0; m < a.levels.size(); ++m) {
    const auto& x = a.levels[m];
    const auto& y = b.levels[m];
    if (x.painted != y.painted || x.ranks.size() != y.ranks.size()) return false;
    for (std::size_t p = 0; p < x.ranks.size(); ++p) {
      const auto& r = x.ranks[p];
      const auto& s = y.ranks[p];
      if (r.frames.list.size() != s.frames.list.size()) return false;
      for (std::size_t i = 0; i < r.frames.list.size(); ++i)
        if (r.frames.list[i].key() != s.frames.list[i].key()) return false;
      if (r.paintings.size() != s.paintings.size()) return false;
      for (std::size_t i = 0; i < r.paintings.size(); ++i)
        if (!(r.paintings[i] == s.paintings[i])) return false;
      if (r.restr_frame != s.restr_frame || r.restr_painting != s.restr_painting) return false;
      if (!(r.coh_frame == s.coh_frame) || !(r.coh_painting == s.coh_painting)) return false;
    }
  }
  return true;
}

inline const char* coh2_note =
    "coh2_frame: not materialized; equalities between decidable structural values are unique";

/// Level 0: frame^{0,0} = {*} and nothing else.
inline StageBundle init_bundle(Arity nu) {
  StageBundle b;
  b.nu = nu.value();
  b.level = 0;
  LevelTables L;
  L.ranks.resize(1);
  L.ranks[0].frames.assign({Frame::star()});
  b.levels.push_back(std::move(L));
  b.notes.push_back(coh2_note);
  return b;
}

/// The working state handed to each stage, and to test hooks between stages.
struct Workspace {
  StageBundle bundle;
  LevelFamily family;
  int m = 0;
  std::set<Stage> done;
};

struct BuildHooks {
  /// Stage order; empty means the canonical order.
  std::vector<Stage> order;
  /// Called right before each stage runs.
  std::function<void(Stage, Workspace&)> before;
};

namespace detail {

using Trace = std::vector<std::string>;

class LevelBuilder {
public:
  LevelBuilder(Workspace& ws, Trace* trace) : ws_(ws), b_(ws.bundle), E_(ws.family), m_(ws.m), R_(Arity(b_.nu)), trace_(trace) {}

  void run(Stage s) {
    for (Stage need : prerequisites(s))
      if (!ws_.done.count(need)) fail(s, std::string("needs the output of stage ") + stage_name(need));
    switch (s) {
    case Stage::frame_spec: frame_spec(); break;
    case Stage::painting_spec: painting_spec(); break;
    case Stage::frame_and_restr_frame_spec: frame_and_restr_frame_spec(); break;
    case Stage::painting: painting(); break;
    case Stage::restr_painting_spec: restr_painting_spec(); break;
    case Stage::restr_frame_and_coh_frame_spec: restr_frame_and_coh_frame_spec(); break;
    case Stage::restr_painting: restr_painting(); break;
    case Stage::coh_painting_spec: coh_painting_spec(); break;
    case Stage::coh_frame: coh_frame(); break;
    case Stage::coh_painting: coh_painting(); break;
    }
    ws_.done.insert(s);
  }

private:
  [[noreturn]] void fail(Stage s, const std::string& what) const { throw StageError(s, m_, what); }

  void log(Stage s, int lo, int hi, const std::string& sizes) {
    if (!trace_) return;
    std::ostringstream os;
    os << "level " << m_ << "  " << stage_name(s) << "  ranks ";
    if (lo > hi)
      os << "-";
    else
      os << lo << ".." << hi;
    os << "  " << sizes;
    trace_->push_back(os.str());
  }

  LevelTables& level(int k) { return b_.levels.at(static_cast<std::size_t>(k)); }

  // FRAME: frame^{m,p} is present for p <= m, every entry has the right
  // shape and every frame extends one of the previous rank.
  void frame_spec() {
    const Stage s = Stage::frame_spec;
    if (b_.level != m_) fail(s, "bundle is at level " + std::to_string(b_.level));
    if (static_cast<int>(b_.levels.size()) != m_ + 1 || static_cast<int>(level(m_).ranks.size()) != m_ + 1)
      fail(s, "frame tables for level " + std::to_string(m_) + " are missing");
    std::string sizes;
    for (int p = 0; p <= m_; ++p) {
      const FrameTable& t = b_.at(m_, p).frames;
      if (t.index.size() != t.list.size()) fail(s, "frame^{" + std::to_string(m_) + "," + std::to_string(p) + "} index is stale");
      for (std::uint32_t i = 0; i < t.list.size(); ++i) {
        const Frame& d = t.list[i];
        if (!frame_has_shape(d, b_.nu, m_, p)) fail(s, "frame " + d.key() + " has the wrong shape");
        auto at = t.find(d.key());
        if (!at || *at != i) fail(s, "frame " + d.key() + " is not indexed");
        if (p > 0 && !b_.at(m_, p - 1).frames.find(d.prefix().key()))
          fail(s, "frame " + d.key() + " extends a prefix outside frame^{" + std::to_string(m_) + "," +
                      std::to_string(p - 1) + "}");
      }
      sizes += (p ? "," : "frames=") + std::to_string(t.size());
    }
    log(s, 0, m_, sizes);
  }

  // PAINTING: E_m is a family at level m over well-formed fullframe keys.
  void painting_spec() {
    const Stage s = Stage::painting_spec;
    if (E_.level != m_) fail(s, "family declares level " + std::to_string(E_.level));
    std::size_t elements = 0;
    for (const auto& [key, labels] : E_.fibers) {
      Frame d;
      try {
        d = parse_frame_key(key);
      } catch (const DataError& e) {
        fail(s, "malformed fiber key " + key + " (" + e.what() + ")");
      }
      if (!frame_has_shape(d, b_.nu, m_, m_)) fail(s, "fiber key " + key + " is not a fullframe shape at this level");
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!is_valid_label(labels[i])) fail(s, "invalid label '" + labels[i] + "' over " + key);
        if (i > 0 && !(labels[i - 1] < labels[i])) fail(s, "fiber over " + key + " is not sorted and duplicate-free");
      }
      elements += labels.size();
    }
    log(s, m_, m_, "fibers=" + std::to_string(E_.fibers.size()) + " elements=" + std::to_string(elements));
  }

  // frame + restr_FRAME: E_m must be keyed on exactly fullframe^m as built so far.
  void frame_and_restr_frame_spec() {
    const Stage s = Stage::frame_and_restr_frame_spec;
    const FrameTable& full = b_.at(m_, m_).frames;
    for (const Frame& d : full.list)
      if (!E_.fibers.count(d.key())) fail(s, "E_" + std::to_string(m_) + " has no fiber over " + d.key());
    for (const auto& [key, labels] : E_.fibers)
      if (!full.find(key))
        fail(s, "E_" + std::to_string(m_) + " is keyed on " + key + ", which is not in fullframe^" + std::to_string(m_));
    log(s, m_, m_, "fullframes=" + std::to_string(full.size()));
  }

  // painting: painting^{m,p}(d) from p = m down to 0.
  void painting() {
    const Stage s = Stage::painting;
    LevelTables& L = level(m_);
    std::string sizes;
    for (int p = m_; p >= 0; --p) {
      RankTables& r = L.ranks[static_cast<std::size_t>(p)];
      r.paintings.assign(r.frames.size(), {});
      for (std::uint32_t i = 0; i < r.frames.size(); ++i) {
        const Frame& d = r.frames.list[i];
        auto& out = r.paintings[i];
        if (p == m_) {
          const auto* labels = E_.fiber(d.key());
          if (!labels) fail(s, "no fiber over " + d.key());
          for (const auto& x : *labels) out.push_back(Painting::top(x));
        } else {
          std::vector<const std::vector<Painting>*> choices;
          for (int e = 0; e < b_.nu; ++e) {
            auto tab = r.restr_frame.find(FaceIndex{0, e});
            if (tab == r.restr_frame.end() || tab->second.size() != r.frames.size())
              fail(s, "restr_frame^{" + std::to_string(m_ - 1) + "," + std::to_string(p) + "}_{0," + std::to_string(e) +
                          "} table is missing");
            const RankTables& below = b_.at(m_ - 1, p);
            std::uint32_t t = tab->second[i];
            if (t >= below.paintings.size()) fail(s, "restr_frame table points outside frame^{" + std::to_string(m_ - 1) + "," + std::to_string(p) + "}");
            choices.push_back(&below.paintings[t]);
          }
          const RankTables& up = L.ranks[static_cast<std::size_t>(p + 1)];
          for_each_layer(choices, [&](const Layer& l) {
            Frame dl = Frame::extend(d, l);
            auto j = up.frames.find(dl.key());
            if (!j) fail(s, "frame " + dl.key() + " is missing from frame^{" + std::to_string(m_) + "," + std::to_string(p + 1) + "}");
            for (const Painting& c : up.paintings[*j]) out.push_back(Painting::layered(l, c));
          });
          std::sort(out.begin(), out.end());
        }
      }
      sizes = std::to_string(r.painting_count()) + (sizes.empty() ? "" : ",") + sizes;
    }
    L.painted = true;
    log(s, 0, m_, "paintings=" + sizes);
  }

  // restr_PAINTING: the tables restr_painting^{m-1,p} will read exist.
  void restr_painting_spec() {
    const Stage s = Stage::restr_painting_spec;
    for (int p = 0; p <= m_ - 1; ++p) {
      const RankTables& r = b_.at(m_, p);
      const RankTables& below = b_.at(m_ - 1, p);
      if (!level(m_ - 1).painted || below.paintings.size() != below.frames.size())
        fail(s, "painting^{" + std::to_string(m_ - 1) + "," + std::to_string(p) + "} is not available");
      for (const FaceIndex& f : face_indices(m_ - 1, p, Arity(b_.nu))) {
        auto tab = r.restr_frame.find(f);
        if (tab == r.restr_frame.end() || tab->second.size() != r.frames.size())
          fail(s, "restr_frame^{" + std::to_string(m_ - 1) + "," + std::to_string(p) + "}" + to_string(f) + " is missing");
      }
    }
    log(s, 0, m_ - 1, "targets=" + std::to_string(std::max(m_, 0)));
  }

  // restr_frame + coh_FRAME: frame^{m+1,p} together with
  // restr_frame^{m,p} : frame^{m+1,p} -> frame^{m,p}, rank by rank.
  void restr_frame_and_coh_frame_spec() {
    const Stage s = Stage::restr_frame_and_coh_frame_spec;
    LevelTables next;
    next.ranks.resize(static_cast<std::size_t>(m_ + 2));
    next.ranks[0].frames.assign({Frame::star()});
    std::size_t entries = 0;
    std::string sizes = "1";
    for (int p = 0; p <= m_; ++p) {
      RankTables& r = next.ranks[static_cast<std::size_t>(p)];
      const RankTables& target = b_.at(m_, p);
      for (const FaceIndex& f : face_indices(m_, p, Arity(b_.nu))) {
        auto& tab = r.restr_frame[f];
        tab.resize(r.frames.size());
        for (std::uint32_t i = 0; i < r.frames.size(); ++i) {
          Frame img = R_.frame_raw(m_, p, f.q, f.eps, r.frames.list[i]);
          auto j = target.frames.find(img.key());
          if (!j) fail(s, "restr_frame^{" + std::to_string(m_) + "," + std::to_string(p) + "}" + to_string(f) + " of " +
                            r.frames.list[i].key() + " is not in frame^{" + std::to_string(m_) + "," + std::to_string(p) + "}");
          tab[i] = *j;
        }
        entries += tab.size();
      }
      std::vector<Frame> grown;
      for (std::uint32_t i = 0; i < r.frames.size(); ++i) {
        std::vector<const std::vector<Painting>*> choices;
        for (int e = 0; e < b_.nu; ++e) choices.push_back(&target.paintings.at(r.restr_frame.at(FaceIndex{0, e})[i]));
        for_each_layer(choices, [&](const Layer& l) { grown.push_back(Frame::extend(r.frames.list[i], l)); });
      }
      next.ranks[static_cast<std::size_t>(p + 1)].frames.assign(std::move(grown));
      sizes += "," + std::to_string(next.ranks[static_cast<std::size_t>(p + 1)].frames.size());
    }
    // The coherence statement at m-1 compares restr^{m-1} . restr^{m} composites;
    // both tables must cover every admissible index.
    for (int p = 0; p <= m_ - 1; ++p)
      for (const CohIndex& c : coh_indices(m_ - 1, p, Arity(b_.nu))) {
        bool have = next.ranks[static_cast<std::size_t>(p)].restr_frame.count(FaceIndex{c.r, c.omega}) &&
                    next.ranks[static_cast<std::size_t>(p)].restr_frame.count(FaceIndex{c.q + 1, c.eps}) &&
                    b_.at(m_, p).restr_frame.count(FaceIndex{c.q, c.eps}) &&
                    b_.at(m_, p).restr_frame.count(FaceIndex{c.r, c.omega});
        if (!have) fail(s, "coh_frame^{" + std::to_string(m_ - 1) + "," + std::to_string(p) + "}" + to_string(c) + " is ill-typed");
      }
    b_.levels.push_back(std::move(next));
    log(s, 0, m_ + 1, "frames=" + sizes + " restr_frame=" + std::to_string(entries));
  }

  // restr_painting: painting^{m,p} -> painting^{m-1,p} over the matching frame face.
  void restr_painting() {
    const Stage s = Stage::restr_painting;
    std::size_t entries = 0;
    for (int p = 0; p <= m_ - 1; ++p) {
      RankTables& r = b_.at(m_, p);
      const RankTables& below = b_.at(m_ - 1, p);
      for (const FaceIndex& f : face_indices(m_ - 1, p, Arity(b_.nu))) {
        const auto& ft = r.restr_frame.at(f);
        auto& tab = r.restr_painting[f];
        tab.assign(r.frames.size(), {});
        for (std::uint32_t i = 0; i < r.frames.size(); ++i) {
          if (ft[i] >= below.paintings.size()) fail(s, "restr_frame table points outside its target");
          const auto& pool = below.paintings[ft[i]];
          for (const Painting& c : r.paintings.at(i)) {
            Painting img = R_.painting_raw(m_ - 1, p, f.q, f.eps, c);
            auto it = std::lower_bound(pool.begin(), pool.end(), img);
            if (it == pool.end() || !(*it == img))
              fail(s, "restr_painting^{" + std::to_string(m_ - 1) + "," + std::to_string(p) + "}" + to_string(f) + " of " +
                          c.key() + " is not a painting over " + below.frames.list[ft[i]].key());
            tab[i].push_back(static_cast<std::uint32_t>(it - pool.begin()));
            ++entries;
          }
        }
      }
    }
    log(s, 0, m_ - 1, "restr_painting=" + std::to_string(entries));
  }

  // coh_PAINTING: the coherence statement at m-2 on painting^m is well-typed.
  void coh_painting_spec() {
    const Stage s = Stage::coh_painting_spec;
    std::size_t statements = 0;
    for (int p = 0; p <= m_ - 2; ++p)
      for (const CohIndex& c : coh_indices(m_ - 2, p, Arity(b_.nu))) {
        const RankTables& top = b_.at(m_, p);
        const RankTables& mid = b_.at(m_ - 1, p);
        bool have = top.restr_painting.count(FaceIndex{c.r, c.omega}) && top.restr_painting.count(FaceIndex{c.q + 1, c.eps}) &&
                    mid.restr_painting.count(FaceIndex{c.q, c.eps}) && mid.restr_painting.count(FaceIndex{c.r, c.omega});
        if (!have) fail(s, "coh_painting^{" + std::to_string(m_ - 2) + "," + std::to_string(p) + "}" + to_string(c) + " is ill-typed");
        ++statements;
      }
    log(s, 0, m_ - 2, "statements=" + std::to_string(statements));
  }

  // coh_frame^{m-1,p} over frame^{m+1,p}, by composing tables.
  void coh_frame() {
    const Stage s = Stage::coh_frame;
    std::size_t checks = 0;
    for (int p = 0; p <= m_ - 1; ++p) {
      RankTables& top = b_.at(m_ + 1, p);
      const RankTables& mid = b_.at(m_, p);
      Certificate cert;
      for (const CohIndex& c : coh_indices(m_ - 1, p, Arity(b_.nu))) {
        const auto& outer_r = top.restr_frame.at(FaceIndex{c.r, c.omega});
        const auto& outer_q = top.restr_frame.at(FaceIndex{c.q + 1, c.eps});
        const auto& inner_q = mid.restr_frame.at(FaceIndex{c.q, c.eps});
        const auto& inner_r = mid.restr_frame.at(FaceIndex{c.r, c.omega});
        for (std::uint32_t i = 0; i < top.frames.size(); ++i) {
          ++cert.checks;
          if (inner_q.at(outer_r[i]) != inner_r.at(outer_q[i])) {
            ++cert.failures;
            top.coh_frame = cert;
            fail(s, "coh_frame^{" + std::to_string(m_ - 1) + "," + std::to_string(p) + "}" + to_string(c) + " fails on " +
                        top.frames.list[i].key());
          }
        }
      }
      top.coh_frame = cert;
      checks += cert.checks;
    }
    log(s, 0, m_ - 1, "checks=" + std::to_string(checks));
  }

  // coh_painting^{m-2,p} over painting^{m,p}.
  void coh_painting() {
    const Stage s = Stage::coh_painting;
    std::size_t checks = 0;
    for (int p = 0; p <= m_ - 2; ++p) {
      RankTables& top = b_.at(m_, p);
      const RankTables& mid = b_.at(m_ - 1, p);
      Certificate cert;
      for (const CohIndex& c : coh_indices(m_ - 2, p, Arity(b_.nu))) {
        FaceIndex fr{c.r, c.omega}, fq1{c.q + 1, c.eps}, fq{c.q, c.eps};
        auto side = [&](FaceIndex outer, FaceIndex inner, std::uint32_t i, std::uint32_t j) {
          std::uint32_t d1 = top.restr_frame.at(outer)[i];
          std::uint32_t c1 = top.restr_painting.at(outer)[i].at(j);
          std::uint32_t d2 = mid.restr_frame.at(inner).at(d1);
          std::uint32_t c2 = mid.restr_painting.at(inner).at(d1).at(c1);
          return std::pair{d2, c2};
        };
        for (std::uint32_t i = 0; i < top.frames.size(); ++i)
          for (std::uint32_t j = 0; j < top.paintings[i].size(); ++j) {
            ++cert.checks;
            if (side(fr, fq, i, j) != side(fq1, fr, i, j)) {
              ++cert.failures;
              top.coh_painting = cert;
              fail(s, "coh_painting^{" + std::to_string(m_ - 2) + "," + std::to_string(p) + "}" + to_string(c) +
                          " fails on " + top.paintings[i][j].key());
            }
          }
      }
      top.coh_painting = cert;
      checks += cert.checks;
    }
    log(s, 0, m_ - 2, "checks=" + std::to_string(checks));
  }

  template <class F>
  static void for_each_layer(const std::vector<const std::vector<Painting>*>& choices, F&& f) {
    for (const auto* c : choices)
      if (c->empty()) return;
    std::vector<std::size_t> at(choices.size(), 0);
    for (;;) {
      Layer l;
      for (std::size_t e = 0; e < choices.size(); ++e) l.parts.push_back((*choices[e])[at[e]]);
      f(l);
      std::size_t k = choices.size();
      while (k > 0) {
        --k;
        if (++at[k] < choices[k]->size()) break;
        at[k] = 0;
        if (k == 0) return;
      }
      if (choices.empty()) return;
    }
  }

  Workspace& ws_;
  StageBundle& b_;
  const LevelFamily& E_;
  int m_;
  Restrictor R_;
  Trace* trace_;
};

} // namespace detail

/// Consumes E_n and returns the bundle at level n+1.
inline StageBundle build_level(const StageBundle& b, const LevelFamily& E, std::vector<std::string>* trace = nullptr,
                               const BuildHooks& hooks = {}) {
  Workspace ws{b, E, b.level, {}};
  std::vector<Stage> order = hooks.order.empty() ? std::vector<Stage>(canonical_order.begin(), canonical_order.end())
                                                 : hooks.order;
  detail::LevelBuilder builder(ws, trace);
  for (Stage s : order) {
    if (hooks.before) hooks.before(s, ws);
    builder.run(s);
  }
  for (Stage s : canonical_order)
    if (!ws.done.count(s)) throw StageError(s, ws.m, "stage never ran");
  ws.bundle.families.push_back(E);
  ws.bundle.level = ws.m + 1;
  return std::move(ws.bundle);
}

/// Folds build_level over the families, starting from the init bundle.
inline StageBundle build_tower(Arity nu, const std::vector<LevelFamily>& families,
                               std::vector<std::string>* trace = nullptr) {
  StageBundle b = init_bundle(nu);
  if (trace) trace->push_back("level 0  init  ranks 0..0  frames=1");
  for (const LevelFamily& E : families) b = build_level(b, E, trace);
  return b;
}

inline StageBundle build_tower(const TruncatedNuSet& D, std::vector<std::string>* trace = nullptr) {
  return build_tower(D.nu(), D.levels(), trace);
}

} // namespace nuset::staged
