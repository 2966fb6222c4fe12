#pragma once

// Symbolic unfolding over opaque families E_0, E_1, ...
//
//   frame^{n,0}          = unit
//   frame^{n,p+1}        = Σ d : frame^{n,p}. layer^{n-1,p}(d)
//   layer^{m,p}(d)       = Π_e painting^{m,p}(restr_frame^{m,p}_{0,e}(d))
//   painting^{m,p}(d)    = Σ l : layer^{m-1,p}(d). painting^{m,p+1}((d, l))     (p < m)
//   painting^{m,m}(d)    = E_m(d)
//
// A frame term is * or a pair (frame, layer); a layer term is a ν-tuple of
// painting terms; a painting term is a pair (layer, painting) or a variable
// standing for an element of some E_m. Restrictions reduce on these
// constructors exactly as the value-level operators in restrict.hpp do.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nuset/concrete.hpp"
#include "nuset/error.hpp"
#include "nuset/indices.hpp"
#include "nuset/value.hpp"

namespace nuset::sym {

enum class RestrKind { frame, layer, painting };

inline const char* to_string(RestrKind k) {
  switch (k) {
  case RestrKind::frame: return "frame";
  case RestrKind::layer: return "layer";
  case RestrKind::painting: return "painting";
  }
  return "?";
}

class Term {
public:
  enum class Kind { star, pair, tuple, var, restr, proj };

  static Term star() {
    static const Term t(std::make_shared<const Node>(Node(Kind::star)));
    return t;
  }
  static Term pair(Term a, Term b) {
    Node n(Kind::pair);
    n.args = {std::move(a), std::move(b)};
    return Term(std::make_shared<const Node>(std::move(n)));
  }
  static Term tuple(std::vector<Term> parts) {
    Node n(Kind::tuple);
    n.args = std::move(parts);
    return Term(std::make_shared<const Node>(std::move(n)));
  }
  static Term var(std::string name) {
    Node n(Kind::var);
    n.name = std::move(name);
    return Term(std::make_shared<const Node>(std::move(n)));
  }
  static Term restr(RestrKind rk, int n, int p, int q, int eps, Term arg) {
    if (n < 0 || p < 0 || q < 0 || eps < 0 || q > n - p)
      throw IndexError("restr_" + std::string(to_string(rk)) + ": indices out of range");
    Node nd(Kind::restr);
    nd.rk = rk;
    nd.n = n;
    nd.p = p;
    nd.q = q;
    nd.eps = eps;
    nd.args = {std::move(arg)};
    return Term(std::make_shared<const Node>(std::move(nd)));
  }
  static Term proj(int eps, Term arg) {
    Node n(Kind::proj);
    n.eps = eps;
    n.args = {std::move(arg)};
    return Term(std::make_shared<const Node>(std::move(n)));
  }

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }
  const std::string& name() const { return node_->name; }
  const std::vector<Term>& args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args.at(i); }
  RestrKind restr_kind() const { return node_->rk; }
  int n() const { return node_->n; }
  int p() const { return node_->p; }
  int q() const { return node_->q; }
  int eps() const { return node_->eps; }

  std::string str() const {
    switch (kind()) {
    case Kind::star: return "*";
    case Kind::var: return name();
    case Kind::pair: return "(" + arg(0).str() + ", " + arg(1).str() + ")";
    case Kind::tuple: {
      std::string s = "[";
      for (std::size_t i = 0; i < args().size(); ++i) s += (i ? "|" : "") + args()[i].str();
      return s + "]";
    }
    case Kind::restr:
      return "restr_" + std::string(to_string(restr_kind())) + "^{" + std::to_string(n()) + "," + std::to_string(p()) +
             "}_{" + std::to_string(q()) + "," + std::to_string(eps()) + "}(" + arg(0).str() + ")";
    case Kind::proj: return "pi_" + std::to_string(eps()) + "(" + arg(0).str() + ")";
    }
    return "?";
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    return x.kind == y.kind && x.name == y.name && x.rk == y.rk && x.n == y.n && x.p == y.p && x.q == y.q &&
           x.eps == y.eps && x.args == y.args;
  }

private:
  struct Node {
    explicit Node(Kind k) : kind(k) {}
    Kind kind;
    std::string name;
    std::vector<Term> args;
    RestrKind rk = RestrKind::frame;
    int n = 0, p = 0, q = 0, eps = 0;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

class Type {
public:
  enum class Kind { unit, sigma, prod, fam, sort };

  static Type unit() { return Type(std::make_shared<const Node>(Node(Kind::unit))); }
  static Type sort() { return Type(std::make_shared<const Node>(Node(Kind::sort))); }
  static Type sigma(std::string name, Type dom, Type body) {
    Node n(Kind::sigma);
    n.name = std::move(name);
    n.parts = {std::move(dom), std::move(body)};
    return Type(std::make_shared<const Node>(std::move(n)));
  }
  static Type prod(std::vector<Type> parts) {
    Node n(Kind::prod);
    n.parts = std::move(parts);
    return Type(std::make_shared<const Node>(std::move(n)));
  }
  static Type fam(int level, Term arg) {
    if (level < 0) throw IndexError("E_k needs k >= 0");
    Node n(Kind::fam);
    n.level = level;
    n.arg = std::move(arg);
    return Type(std::make_shared<const Node>(std::move(n)));
  }

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }
  const std::string& name() const { return node_->name; }
  const Type& dom() const { return node_->parts.at(0); }
  const Type& body() const { return node_->parts.at(1); }
  const std::vector<Type>& parts() const { return node_->parts; }
  int level() const { return node_->level; }
  const Term& arg() const { return *node_->arg; }
  bool is_atom() const { return is(Kind::fam) || is(Kind::sort); }

  std::string str() const {
    switch (kind()) {
    case Kind::unit: return "unit";
    case Kind::sort: return "HSet";
    case Kind::fam: return "E_" + std::to_string(level()) + "(" + arg().str() + ")";
    case Kind::sigma: return "Σ " + name() + " : " + dom().str() + ". " + body().str();
    case Kind::prod: {
      std::string s = "Π[";
      for (std::size_t i = 0; i < parts().size(); ++i) s += (i ? " | " : "") + parts()[i].str();
      return s + "]";
    }
    }
    return "?";
  }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.kind != y.kind || x.name != y.name || x.level != y.level || x.parts != y.parts) return false;
    if (x.arg.has_value() != y.arg.has_value()) return false;
    return !x.arg || *x.arg == *y.arg;
  }

private:
  struct Node {
    explicit Node(Kind k) : kind(k) {}
    Kind kind;
    std::string name;
    std::vector<Type> parts;
    int level = 0;
    std::optional<Term> arg;
  };
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Reduction

inline Term reduce(const Term& t);

namespace detail {

inline Term step_restr(RestrKind rk, int n, int p, int q, int eps, const Term& a) {
  switch (rk) {
  case RestrKind::frame:
    if (p == 0) return Term::star();
    if (a.is(Term::Kind::pair))
      return Term::pair(reduce(Term::restr(RestrKind::frame, n, p - 1, q + 1, eps, a.arg(0))),
                        reduce(Term::restr(RestrKind::layer, n - 1, p - 1, q, eps, a.arg(1))));
    break;
  case RestrKind::layer:
    if (a.is(Term::Kind::tuple)) {
      std::vector<Term> out;
      for (const Term& c : a.args()) out.push_back(reduce(Term::restr(RestrKind::painting, n, p, q, eps, c)));
      return Term::tuple(std::move(out));
    }
    break;
  case RestrKind::painting:
    if (q == 0) return reduce(Term::proj(eps, a));
    if (a.is(Term::Kind::pair))
      return Term::pair(reduce(Term::restr(RestrKind::layer, n - 1, p, q - 1, eps, a.arg(0))),
                        reduce(Term::restr(RestrKind::painting, n, p + 1, q - 1, eps, a.arg(1))));
    break;
  }
  return Term::restr(rk, n, p, q, eps, a);
}

} // namespace detail

/// Full normal form: restrictions of constructor terms are unfolded and
/// projections out of explicit layers are taken; stuck redexes stay put.
inline Term reduce(const Term& t) {
  switch (t.kind()) {
  case Term::Kind::star:
  case Term::Kind::var: return t;
  case Term::Kind::pair: return Term::pair(reduce(t.arg(0)), reduce(t.arg(1)));
  case Term::Kind::tuple: {
    std::vector<Term> out;
    for (const Term& c : t.args()) out.push_back(reduce(c));
    return Term::tuple(std::move(out));
  }
  case Term::Kind::restr:
    return detail::step_restr(t.restr_kind(), t.n(), t.p(), t.q(), t.eps(), reduce(t.arg(0)));
  case Term::Kind::proj: {
    Term a = reduce(t.arg(0));
    if (a.is(Term::Kind::pair) && a.arg(0).is(Term::Kind::tuple)) {
      const auto& parts = a.arg(0).args();
      if (t.eps() >= static_cast<int>(parts.size())) throw IndexError("projection past the end of a layer");
      return parts[static_cast<std::size_t>(t.eps())];
    }
    return Term::proj(t.eps(), a);
  }
  }
  return t;
}

inline Term subst(const Term& t, const std::map<std::string, Term>& env) {
  switch (t.kind()) {
  case Term::Kind::star: return t;
  case Term::Kind::var: {
    auto it = env.find(t.name());
    return it == env.end() ? t : it->second;
  }
  case Term::Kind::pair: return Term::pair(subst(t.arg(0), env), subst(t.arg(1), env));
  case Term::Kind::tuple: {
    std::vector<Term> out;
    for (const Term& c : t.args()) out.push_back(subst(c, env));
    return Term::tuple(std::move(out));
  }
  case Term::Kind::restr: return Term::restr(t.restr_kind(), t.n(), t.p(), t.q(), t.eps(), subst(t.arg(0), env));
  case Term::Kind::proj: return Term::proj(t.eps(), subst(t.arg(0), env));
  }
  return t;
}

/// Variable names in left-to-right order of occurrence (with repeats).
inline void term_vars(const Term& t, std::vector<std::string>& out) {
  if (t.is(Term::Kind::var)) {
    out.push_back(t.name());
    return;
  }
  for (const Term& c : t.args()) term_vars(c, out);
}

inline std::vector<std::string> term_vars(const Term& t) {
  std::vector<std::string> out;
  term_vars(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Values <-> terms

inline Term painting_term(const Painting& c);

inline Term layer_term(const Layer& l) {
  std::vector<Term> parts;
  for (const Painting& c : l.parts) parts.push_back(painting_term(c));
  return Term::tuple(std::move(parts));
}

inline Term painting_term(const Painting& c) {
  if (c.is_top()) return Term::var(c.label());
  return Term::pair(layer_term(c.layer()), painting_term(c.rest()));
}

inline Term frame_term(const Frame& d) {
  if (d.is_star()) return Term::star();
  return Term::pair(frame_term(d.prefix()), layer_term(d.top()));
}

using Valuation = std::function<std::string(const std::string&)>;

inline Painting term_painting(const Term& t, const Valuation& val = nullptr);

inline Layer term_layer(const Term& t, const Valuation& val) {
  if (!t.is(Term::Kind::tuple)) throw ShapeError("expected a layer term, got " + t.str());
  Layer l;
  for (const Term& c : t.args()) l.parts.push_back(term_painting(c, val));
  return l;
}

inline Painting term_painting(const Term& t, const Valuation& val) {
  if (t.is(Term::Kind::var)) return Painting::top(val ? val(t.name()) : t.name());
  if (t.is(Term::Kind::pair)) return Painting::layered(term_layer(t.arg(0), val), term_painting(t.arg(1), val));
  throw ShapeError("expected a painting term, got " + t.str());
}

inline Frame term_frame(const Term& t, const Valuation& val = nullptr) {
  if (t.is(Term::Kind::star)) return Frame::star();
  if (t.is(Term::Kind::pair)) return Frame::extend(term_frame(t.arg(0), val), term_layer(t.arg(1), val));
  throw ShapeError("expected a frame term, got " + t.str());
}

// ---------------------------------------------------------------------------
// Unfolding

namespace detail {

class Unfolder {
public:
  explicit Unfolder(int nu) : nu_(nu) {}

  Type frame(int n, int p) {
    if (p == 0) return Type::unit();
    std::string d = fresh("d");
    Type prefix = frame(n, p - 1);
    return Type::sigma(d, prefix, layer(n - 1, p - 1, Term::var(d)));
  }

  Type layer(int m, int p, const Term& d) {
    std::vector<Type> parts;
    for (int e = 0; e < nu_; ++e) parts.push_back(painting(m, p, reduce(Term::restr(RestrKind::frame, m, p, 0, e, d))));
    return Type::prod(std::move(parts));
  }

  Type painting(int m, int p, const Term& d) {
    if (p == m) return Type::fam(m, d);
    std::string l = fresh("l");
    Type dom = layer(m - 1, p, d);
    return Type::sigma(l, dom, painting(m, p + 1, Term::pair(d, Term::var(l))));
  }

private:
  std::string fresh(const std::string& stem) { return stem + std::to_string(counter_++); }
  int nu_;
  int counter_ = 0;
};

} // namespace detail

/// The unfolded type of frame^{n,p}, one Σ per layer.
inline Type unfold_frame(Arity nu, int n, int p) {
  require_rank(n, p);
  return detail::Unfolder(nu.value()).frame(n, p);
}

/// The unfolded type of painting^{n,p} over the frame variable d (over * when p = 0).
inline Type unfold_painting(Arity nu, int n, int p) {
  require_rank(n, p);
  return detail::Unfolder(nu.value()).painting(n, p, p == 0 ? Term::star() : Term::var("d"));
}

// ---------------------------------------------------------------------------
// Normalization

struct TelescopeEntry {
  std::string name;
  Type atom;
};

/// A flat list of atomic components plus the term that rebuilds an
/// inhabitant of the original type from the component variables.
struct Telescope {
  std::vector<TelescopeEntry> entries;
  Term pattern = Term::star();
};

namespace detail {

inline void collect_names(const Type& t, std::set<std::string>& out) {
  switch (t.kind()) {
  case Type::Kind::sigma:
    out.insert(t.name());
    collect_names(t.dom(), out);
    collect_names(t.body(), out);
    break;
  case Type::Kind::prod:
    for (const Type& c : t.parts()) collect_names(c, out);
    break;
  case Type::Kind::fam:
    for (auto& v : term_vars(t.arg())) out.insert(v);
    break;
  default: break;
  }
}

class Flattener {
public:
  explicit Flattener(const Type& t) { collect_names(t, taken_); }

  Term flatten(const Type& t, const std::map<std::string, Term>& env, const std::string& hint) {
    switch (t.kind()) {
    case Type::Kind::unit: return Term::star();
    case Type::Kind::sort:
    case Type::Kind::fam: {
      std::string name = pick(hint);
      Type atom = t.is(Type::Kind::sort) ? t : Type::fam(t.level(), reduce(subst(t.arg(), env)));
      out.entries.push_back({name, atom});
      return Term::var(name);
    }
    case Type::Kind::sigma: {
      Term a = flatten(t.dom(), env, t.name());
      auto inner = env;
      inner.insert_or_assign(t.name(), a);
      Term b = flatten(t.body(), inner, "");
      return Term::pair(a, b);
    }
    case Type::Kind::prod: {
      std::vector<Term> parts;
      for (const Type& c : t.parts()) parts.push_back(flatten(c, env, ""));
      return Term::tuple(std::move(parts));
    }
    }
    return Term::star();
  }

  Telescope out;

private:
  std::string pick(const std::string& hint) {
    if (!hint.empty() && !used_.count(hint)) {
      used_.insert(hint);
      return hint;
    }
    for (;;) {
      std::string n = "x" + std::to_string(counter_++);
      if (!taken_.count(n) && !used_.count(n)) {
        used_.insert(n);
        return n;
      }
    }
  }

  std::set<std::string> taken_;
  std::set<std::string> used_;
  int counter_ = 0;
};

} // namespace detail

inline Telescope telescope(const Type& t) {
  detail::Flattener f(t);
  f.out.pattern = f.flatten(t, {}, "");
  return std::move(f.out);
}

/// Units dropped, Σ and finite products flattened into one right-nested
/// telescope of atoms, argument terms reduced. Idempotent.
inline Type normalize(const Type& t) {
  Telescope tel = telescope(t);
  if (tel.entries.empty()) return Type::unit();
  Type acc = tel.entries.back().atom;
  for (std::size_t i = tel.entries.size() - 1; i-- > 0;)
    acc = Type::sigma(tel.entries[i].name, tel.entries[i].atom, acc);
  return acc;
}

inline std::size_t count_fam_leaves(const Type& t) {
  switch (t.kind()) {
  case Type::Kind::fam: return 1;
  case Type::Kind::sigma: return count_fam_leaves(t.dom()) + count_fam_leaves(t.body());
  case Type::Kind::prod: {
    std::size_t s = 0;
    for (const Type& c : t.parts()) s += count_fam_leaves(c);
    return s;
  }
  default: return 0;
  }
}

// ---------------------------------------------------------------------------
// Signatures

struct Glyphs {
  std::string pi, times, arrow;
};

inline Glyphs glyphs(bool ascii) { return ascii ? Glyphs{"Pi", "x", "->"} : Glyphs{"Π", "×", "→"}; }

/// Display name for the i-th named binder: a .. z, a1 .. z1, ...
inline std::string binder_name(std::size_t i) {
  std::string s(1, static_cast<char>('a' + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

/// The type of E_n: a dependent function from fullframe^n into sets.
struct Signature {
  int level = 0;
  Type domain = Type::unit();  // normalized
  Telescope components;

  std::string render(bool ascii = false) const {
    Glyphs g = glyphs(ascii);
    std::set<std::string> referenced;
    for (const auto& e : components.entries)
      if (e.atom.is(Type::Kind::fam))
        for (auto& v : term_vars(e.atom.arg())) referenced.insert(v);

    std::map<std::string, std::string> shown;
    for (const auto& e : components.entries)
      if (referenced.count(e.name)) shown[e.name] = binder_name(shown.size());

    auto atom_text = [&](const Type& a) {
      if (a.is(Type::Kind::sort)) return std::string("HSet");
      std::string s = "E_" + std::to_string(a.level());
      auto vars = term_vars(a.arg());
      if (vars.empty()) return s;
      s += "(";
      for (std::size_t i = 0; i < vars.size(); ++i) {
        auto it = shown.find(vars[i]);
        s += (i ? "," : "") + (it == shown.end() ? vars[i] : it->second);
      }
      return s + ")";
    };

    std::string binders, product;
    for (const auto& e : components.entries) {
      if (referenced.count(e.name)) {
        bool bare = e.atom.is(Type::Kind::fam) && e.atom.level() == 0;
        binders += " " + (bare ? shown[e.name] : "(" + shown[e.name] + " : " + atom_text(e.atom) + ")");
      } else {
        product += (product.empty() ? "" : " " + g.times + " ") + atom_text(e.atom);
      }
    }
    std::string out = "E_" + std::to_string(level) + " : ";
    if (!binders.empty()) out += g.pi + binders + ". ";
    if (!product.empty()) out += product + " " + g.arrow + " ";
    return out + "HSet";
  }
};

inline Signature signature(Arity nu, int n) {
  if (n < 0) throw IndexError("signature: level must be >= 0");
  Type t = unfold_frame(nu, n, n);
  Signature s;
  s.level = n;
  s.domain = normalize(t);
  s.components = telescope(t);
  return s;
}

// ---------------------------------------------------------------------------
// Formal restrictions and coherence as syntactic identity

/// restr_frame^{n,p}_{q,e} on a formal frame (leaves are variables), computed
/// by reducing the restriction term.
inline Frame symbolic_restr_frame(Arity nu, int n, int p, FaceIndex f, const Frame& d) {
  require_face(n, p, nu.value(), f);
  check_frame_shape(d, nu.value(), n + 1, p);
  return term_frame(reduce(Term::restr(RestrKind::frame, n, p, f.q, f.eps, frame_term(d))));
}

inline Painting symbolic_restr_painting(Arity nu, int n, int p, FaceIndex f, const Painting& c) {
  require_face(n, p, nu.value(), f);
  check_painting_shape(c, nu.value(), n + 1, p);
  return term_painting(reduce(Term::restr(RestrKind::painting, n, p, f.q, f.eps, painting_term(c))));
}

struct CohReport {
  bool holds = true;
  std::string lhs, rhs;
  std::vector<std::string> mismatches;  // paths "i.j.k" into the two trees
};

namespace detail {

inline void diff(const Term& a, const Term& b, const std::string& path, std::vector<std::string>& out) {
  if (a == b) return;
  if (a.kind() != b.kind() || a.args().size() != b.args().size() || a.is(Term::Kind::var) ||
      a.is(Term::Kind::restr) || a.is(Term::Kind::proj)) {
    out.push_back((path.empty() ? "root" : path) + ": " + a.str() + " vs " + b.str());
    return;
  }
  for (std::size_t i = 0; i < a.args().size(); ++i)
    diff(a.args()[i], b.args()[i], path.empty() ? std::to_string(i) : path + "." + std::to_string(i), out);
}

inline CohReport compare(const Term& lhs, const Term& rhs) {
  CohReport r;
  r.lhs = lhs.str();
  r.rhs = rhs.str();
  diff(lhs, rhs, "", r.mismatches);
  r.holds = r.mismatches.empty();
  return r;
}

} // namespace detail

/// restr_q,e . restr_r,w and restr_r,w . restr_{q+1},e applied to a generic
/// frame^{n+2,p}; the law holds when both normal forms are the same tree.
inline CohReport check_coh_refl(Arity nu, int n, int p, const CohIndex& c) {
  require_coh(n, p, nu.value(), c);
  Term d = frame_term(generic_frame(nu.value(), n + 2, p));
  Term lhs = reduce(Term::restr(RestrKind::frame, n, p, c.q, c.eps,
                                reduce(Term::restr(RestrKind::frame, n + 1, p, c.r, c.omega, d))));
  Term rhs = reduce(Term::restr(RestrKind::frame, n, p, c.r, c.omega,
                                reduce(Term::restr(RestrKind::frame, n + 1, p, c.q + 1, c.eps, d))));
  return detail::compare(lhs, rhs);
}

/// The same law on a generic painting^{n+2,p}.
inline CohReport check_coh_refl_painting(Arity nu, int n, int p, const CohIndex& c) {
  require_coh(n, p, nu.value(), c);
  Term x = painting_term(generic_painting(nu.value(), n + 2, p));
  Term lhs = reduce(Term::restr(RestrKind::painting, n, p, c.q, c.eps,
                                reduce(Term::restr(RestrKind::painting, n + 1, p, c.r, c.omega, x))));
  Term rhs = reduce(Term::restr(RestrKind::painting, n, p, c.r, c.omega,
                                reduce(Term::restr(RestrKind::painting, n + 1, p, c.q + 1, c.eps, x))));
  return detail::compare(lhs, rhs);
}

struct CohSweep {
  std::size_t tuples = 0;
  std::size_t failures = 0;
  std::vector<std::string> failed;  // first few

  bool ok() const { return failures == 0; }
};

/// check_coh_refl (and its painting analogue when paintings is set) over every
/// n <= max_n, p <= n and coherence index.
inline CohSweep sweep_coh_refl(Arity nu, int max_n, bool paintings = false) {
  CohSweep s;
  for (int n = 0; n <= max_n; ++n)
    for (int p = 0; p <= n; ++p)
      for (const CohIndex& c : coh_indices(n, p, nu)) {
        ++s.tuples;
        bool ok = check_coh_refl(nu, n, p, c).holds && (!paintings || check_coh_refl_painting(nu, n, p, c).holds);
        if (!ok) {
          ++s.failures;
          if (s.failed.size() < 16)
            s.failed.push_back("n=" + std::to_string(n) + " p=" + std::to_string(p) + " " + to_string(c));
        }
      }
  return s;
}

// ---------------------------------------------------------------------------
// Denotation: instantiate a telescope with the finite families of a D.

/// Every inhabitant of the type of frame^{n,n} read off its normalized
/// telescope, with E_k taken from D. Should coincide with enumerate_fullframe.
inline std::vector<Frame> denote_fullframe(const TruncatedNuSet& D, int n) {
  if (n > D.depth()) throw DataError("denote_fullframe: level " + std::to_string(n) + " beyond depth");
  Telescope tel = telescope(unfold_frame(D.nu(), n, n));
  std::vector<Frame> out;
  std::map<std::string, std::string> env;
  Valuation val = [&env](const std::string& v) { return env.at(v); };

  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == tel.entries.size()) {
      out.push_back(term_frame(tel.pattern, val));
      return;
    }
    const auto& e = tel.entries[i];
    if (!e.atom.is(Type::Kind::fam)) throw DataError("denote_fullframe: unexpected atom " + e.atom.str());
    Frame where = term_frame(e.atom.arg(), val);
    const auto* labels = D.level(e.atom.level()).fiber(where.key());
    if (!labels) return;
    for (const auto& label : *labels) {
      env[e.name] = label;
      go(i + 1);
    }
    env.erase(e.name);
  };
  go(0);
  std::sort(out.begin(), out.end(), [](const Frame& a, const Frame& b) { return a.key() < b.key(); });
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const Term& t) {
  using nlohmann::json;
  switch (t.kind()) {
  case Term::Kind::star: return json{{"kind", "star"}};
  case Term::Kind::var: return json{{"kind", "var"}, {"name", t.name()}};
  case Term::Kind::pair: return json{{"kind", "pair"}, {"fst", to_json(t.arg(0))}, {"snd", to_json(t.arg(1))}};
  case Term::Kind::tuple: {
    json parts = json::array();
    for (const Term& c : t.args()) parts.push_back(to_json(c));
    return json{{"kind", "tuple"}, {"parts", parts}};
  }
  case Term::Kind::restr:
    return json{{"kind", "restr"}, {"of", to_string(t.restr_kind())}, {"n", t.n()},    {"p", t.p()},
                {"q", t.q()},      {"eps", t.eps()},                  {"arg", to_json(t.arg(0))}};
  case Term::Kind::proj: return json{{"kind", "proj"}, {"eps", t.eps()}, {"arg", to_json(t.arg(0))}};
  }
  return nullptr;
}

inline nlohmann::json to_json(const Type& t) {
  using nlohmann::json;
  switch (t.kind()) {
  case Type::Kind::unit: return json{{"kind", "unit"}};
  case Type::Kind::sort: return json{{"kind", "sort"}};
  case Type::Kind::fam: return json{{"kind", "fam"}, {"level", t.level()}, {"arg", to_json(t.arg())}};
  case Type::Kind::sigma:
    return json{{"kind", "sigma"}, {"name", t.name()}, {"dom", to_json(t.dom())}, {"body", to_json(t.body())}};
  case Type::Kind::prod: {
    json parts = json::array();
    for (const Type& c : t.parts()) parts.push_back(to_json(c));
    return json{{"kind", "prod"}, {"parts", parts}};
  }
  }
  return nullptr;
}

} // namespace nuset::sym
