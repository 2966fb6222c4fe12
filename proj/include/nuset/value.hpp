#pragma once

// Finite tree values inhabiting frame^{n,p}, layer^{n,p} and painting^{n,p}.
//
// A frame of rank p at level n is a stack of p layers; layer k holds nu
// paintings of rank k at level n-1. A painting of rank k at level m is the
// remaining layers k..m-1 plus a top element of E_m. The frame a painting
// lives over is never stored inside it, so every leaf is independent data.
//
// Canonical key grammar (no whitespace):
//   frame    := '*' | '(' frame ';' layer ')'
//   layer    := '[' painting ('|' painting)* ']'
//   painting := '#' label | '{' layer ';' painting '}'
//   label    := [A-Za-z0-9_]+

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nuset/error.hpp"

namespace nuset {

inline bool is_valid_label(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
    if (!ok) return false;
  }
  return true;
}

class Painting;

/// nu paintings indexed by direction eps.
struct Layer {
  std::vector<Painting> parts;

  std::size_t size() const { return parts.size(); }
  const Painting& operator[](std::size_t eps) const { return parts[eps]; }
  std::string key() const;
};

class Painting {
public:
  static Painting top(std::string label) {
    if (!is_valid_label(label)) throw DataError("invalid element label '" + label + "'");
    auto node = std::make_shared<Node>();
    node->key = "#" + label;
    node->label = std::move(label);
    node->is_top = true;
    return Painting(std::move(node));
  }

  static Painting layered(Layer layer, Painting rest) {
    auto node = std::make_shared<Node>();
    node->key = "{" + layer.key() + ";" + rest.key() + "}";
    node->depth = rest.depth() + 1;
    node->layer = std::move(layer);
    node->rest = std::make_shared<Painting>(std::move(rest));
    return Painting(std::move(node));
  }

  bool is_top() const { return node_->is_top; }
  const std::string& label() const {
    if (!is_top()) throw ShapeError("label() on a layered painting");
    return node_->label;
  }
  const Layer& layer() const {
    if (is_top()) throw ShapeError("layer() on a top painting " + key());
    return node_->layer;
  }
  const Painting& rest() const {
    if (is_top()) throw ShapeError("rest() on a top painting " + key());
    return *node_->rest;
  }
  /// Number of Layered nodes before the top.
  int depth() const { return node_->depth; }
  const std::string& key() const { return node_->key; }

  friend bool operator==(const Painting& a, const Painting& b) {
    return a.node_ == b.node_ || a.key() == b.key();
  }
  friend bool operator<(const Painting& a, const Painting& b) { return a.key() < b.key(); }

private:
  struct Node {
    std::string key;
    std::string label;
    bool is_top = false;
    int depth = 0;
    Layer layer;
    std::shared_ptr<const Painting> rest;
  };
  explicit Painting(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline std::string Layer::key() const {
  std::string out = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '|';
    out += parts[i].key();
  }
  out += ']';
  return out;
}

inline bool operator==(const Layer& a, const Layer& b) {
  if (a.parts.size() != b.parts.size()) return false;
  for (std::size_t i = 0; i < a.parts.size(); ++i)
    if (!(a.parts[i] == b.parts[i])) return false;
  return true;
}

class Frame {
public:
  Frame() : node_(star_node()) {}

  static Frame star() { return Frame(); }

  static Frame extend(Frame prefix, Layer top) {
    auto node = std::make_shared<Node>();
    node->key = "(" + prefix.key() + ";" + top.key() + ")";
    node->rank = prefix.rank() + 1;
    node->top = std::move(top);
    node->prefix = std::make_shared<Frame>(std::move(prefix));
    return Frame(std::move(node));
  }

  bool is_star() const { return node_->rank == 0; }
  int rank() const { return node_->rank; }
  const Frame& prefix() const {
    if (is_star()) throw ShapeError("prefix() on the empty frame");
    return *node_->prefix;
  }
  const Layer& top() const {
    if (is_star()) throw ShapeError("top() on the empty frame");
    return node_->top;
  }
  /// Layer of rank k (0 = innermost).
  const Layer& layer_at(int k) const {
    if (k < 0 || k >= rank()) throw ShapeError("layer_at(" + std::to_string(k) + ") on a frame of rank " +
                                               std::to_string(rank()));
    const Frame* f = this;
    while (f->rank() > k + 1) f = &f->prefix();
    return f->top();
  }
  /// The rank-k prefix of this frame.
  Frame truncate(int k) const {
    if (k < 0 || k > rank()) throw ShapeError("truncate(" + std::to_string(k) + ") on a frame of rank " +
                                              std::to_string(rank()));
    Frame f = *this;
    while (f.rank() > k) f = f.prefix();
    return f;
  }
  const std::string& key() const { return node_->key; }

  friend bool operator==(const Frame& a, const Frame& b) { return a.node_ == b.node_ || a.key() == b.key(); }
  friend bool operator<(const Frame& a, const Frame& b) { return a.key() < b.key(); }

private:
  struct Node {
    std::string key = "*";
    int rank = 0;
    Layer top;
    std::shared_ptr<const Frame> prefix;
  };
  static std::shared_ptr<const Node> star_node() {
    static const auto node = std::make_shared<const Node>();
    return node;
  }
  explicit Frame(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Shape checks

namespace detail {

inline std::string shape_what(int nu, int m, int k) {
  return "(nu=" + std::to_string(nu) + ", n=" + std::to_string(m) + ", p=" + std::to_string(k) + ")";
}

inline void check_painting_shape(const Painting& c, int nu, int m, int k, const std::string& path) {
  if (k == m) {
    if (!c.is_top()) throw ShapeError("painting at " + path + " should be a top element for " + shape_what(nu, m, k));
    return;
  }
  if (c.is_top()) throw ShapeError("painting at " + path + " is a top element but needs " +
                                   std::to_string(m - k) + " more layers for " + shape_what(nu, m, k));
  const Layer& l = c.layer();
  if (static_cast<int>(l.size()) != nu)
    throw ShapeError("layer at " + path + " has " + std::to_string(l.size()) + " components, expected " +
                     std::to_string(nu));
  for (int e = 0; e < nu; ++e) check_painting_shape(l[e], nu, m - 1, k, path + ".l" + std::to_string(e));
  check_painting_shape(c.rest(), nu, m, k + 1, path + ".c");
}

} // namespace detail

/// Throws ShapeError unless c has the shape of painting^{m,k} for arity nu.
inline void check_painting_shape(const Painting& c, int nu, int m, int k) {
  if (k < 0 || k > m) throw ShapeError("painting rank out of range " + detail::shape_what(nu, m, k));
  detail::check_painting_shape(c, nu, m, k, "c");
}

/// Throws ShapeError unless d has the shape of frame^{n,p} for arity nu.
inline void check_frame_shape(const Frame& d, int nu, int n, int p) {
  if (p < 0 || p > n) throw ShapeError("frame rank out of range " + detail::shape_what(nu, n, p));
  if (d.rank() != p)
    throw ShapeError("frame has rank " + std::to_string(d.rank()) + ", expected " + detail::shape_what(nu, n, p));
  for (int k = 0; k < p; ++k) {
    const Layer& l = d.layer_at(k);
    if (static_cast<int>(l.size()) != nu)
      throw ShapeError("frame layer " + std::to_string(k) + " has " + std::to_string(l.size()) +
                       " components, expected " + std::to_string(nu));
    for (int e = 0; e < nu; ++e)
      detail::check_painting_shape(l[e], nu, n - 1, k, "d.L" + std::to_string(k) + "." + std::to_string(e));
  }
}

inline bool frame_has_shape(const Frame& d, int nu, int n, int p) {
  try {
    check_frame_shape(d, nu, n, p);
    return true;
  } catch (const ShapeError&) {
    return false;
  }
}

inline bool painting_has_shape(const Painting& c, int nu, int m, int k) {
  try {
    check_painting_shape(c, nu, m, k);
    return true;
  } catch (const ShapeError&) {
    return false;
  }
}

/// The fullframe a rank-0 painting lives over at level n, together with its top label.
/// Layer k of the painting becomes layer k of the frame.
inline std::pair<Frame, std::string> split_total_cell(const Painting& cell) {
  Frame d;
  const Painting* c = &cell;
  while (!c->is_top()) {
    d = Frame::extend(d, c->layer());
    c = &c->rest();
  }
  return {d, c->label()};
}

/// Inverse of split_total_cell: fills fullframe d with top label.
inline Painting total_cell(const Frame& d, const std::string& label) {
  Painting c = Painting::top(label);
  for (int k = d.rank() - 1; k >= 0; --k) c = Painting::layered(d.layer_at(k), c);
  return c;
}

// ---------------------------------------------------------------------------
// Canonical key parsing

namespace detail {

class KeyParser {
public:
  explicit KeyParser(std::string_view s) : s_(s) {}

  Frame frame() {
    if (eat('*')) return Frame::star();
    expect('(');
    Frame prefix = frame();
    expect(';');
    Layer l = layer();
    expect(')');
    return Frame::extend(std::move(prefix), std::move(l));
  }

  Layer layer() {
    expect('[');
    Layer l;
    l.parts.push_back(painting());
    while (eat('|')) l.parts.push_back(painting());
    expect(']');
    return l;
  }

  Painting painting() {
    if (eat('#')) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && is_valid_label(s_.substr(pos_, 1))) ++pos_;
      if (pos_ == start) fail("expected a label");
      return Painting::top(std::string(s_.substr(start, pos_ - start)));
    }
    expect('{');
    Layer l = layer();
    expect(';');
    Painting rest = painting();
    expect('}');
    return Painting::layered(std::move(l), std::move(rest));
  }

  void finish() {
    if (pos_ != s_.size()) fail("trailing characters");
  }

private:
  bool eat(char ch) {
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char ch) {
    if (!eat(ch)) fail(std::string("expected '") + ch + "'");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("malformed key '" + std::string(s_) + "': " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

} // namespace detail

inline Frame parse_frame_key(std::string_view key) {
  detail::KeyParser p(key);
  Frame f = p.frame();
  p.finish();
  return f;
}

inline Painting parse_painting_key(std::string_view key) {
  detail::KeyParser p(key);
  Painting c = p.painting();
  p.finish();
  return c;
}

// ---------------------------------------------------------------------------
// Generic (formal) values: every leaf a distinct variable.

namespace detail {

inline Painting generic_painting(int nu, int m, int k, const std::string& prefix, int& counter) {
  if (k == m) return Painting::top(prefix + std::to_string(counter++));
  Layer l;
  for (int e = 0; e < nu; ++e) l.parts.push_back(generic_painting(nu, m - 1, k, prefix, counter));
  Painting rest = generic_painting(nu, m, k + 1, prefix, counter);
  return Painting::layered(std::move(l), std::move(rest));
}

} // namespace detail

/// A frame^{n,p} whose leaves are the distinct variables prefix0, prefix1, ...
/// numbered in depth-first order (inner layers first).
inline Frame generic_frame(int nu, int n, int p, const std::string& prefix = "v") {
  if (p < 0 || p > n) throw IndexError("generic_frame: need 0 <= p <= n");
  int counter = 0;
  Frame d;
  for (int k = 0; k < p; ++k) {
    Layer l;
    for (int e = 0; e < nu; ++e) l.parts.push_back(detail::generic_painting(nu, n - 1, k, prefix, counter));
    d = Frame::extend(d, std::move(l));
  }
  return d;
}

inline Painting generic_painting(int nu, int m, int k, const std::string& prefix = "v") {
  if (k < 0 || k > m) throw IndexError("generic_painting: need 0 <= p <= n");
  int counter = 0;
  return detail::generic_painting(nu, m, k, prefix, counter);
}

/// Leaf labels of a painting, depth-first.
inline void collect_labels(const Painting& c, std::vector<std::string>& out) {
  if (c.is_top()) {
    out.push_back(c.label());
    return;
  }
  for (const auto& part : c.layer().parts) collect_labels(part, out);
  collect_labels(c.rest(), out);
}

inline std::vector<std::string> collect_labels(const Frame& d) {
  std::vector<std::string> out;
  for (int k = 0; k < d.rank(); ++k)
    for (const auto& part : d.layer_at(k).parts) collect_labels(part, out);
  return out;
}

/// Rewrites every leaf label through f, keeping the tree shape.
inline Painting relabel(const Painting& c, const std::function<std::string(const std::string&)>& f) {
  if (c.is_top()) return Painting::top(f(c.label()));
  Layer l;
  for (const auto& part : c.layer().parts) l.parts.push_back(relabel(part, f));
  return Painting::layered(std::move(l), relabel(c.rest(), f));
}

inline Frame relabel(const Frame& d, const std::function<std::string(const std::string&)>& f) {
  if (d.is_star()) return d;
  Layer l;
  for (const auto& part : d.top().parts) l.parts.push_back(relabel(part, f));
  return Frame::extend(relabel(d.prefix(), f), std::move(l));
}

} // namespace nuset
