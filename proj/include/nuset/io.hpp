#pragma once

// JSON documents and the seeded instance generator.
//
// Indexed:  {"levels": [{"dim": k, "fibers": {frame-key: [labels]}}], "nu": N}
// Fibred:   {"dims": [{"dim": n, "elements": [ids], "faces": {"q,eps": {id: id}}}], "nu": N}
//
// Printing uses sorted object keys and two-space indentation, so a document
// read and printed again comes back byte for byte when it was canonical.

#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nuset/concrete.hpp"
#include "nuset/error.hpp"
#include "nuset/fibred.hpp"

namespace nuset::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Fibred documents keep element names, so bad face entries can be reported
// by name before any index is assigned.

struct FibredDim {
  int dim = 0;
  std::vector<std::string> elements;
  std::map<std::string, std::map<std::string, std::string>> faces;  // "q,eps" -> element -> element
  friend bool operator==(const FibredDim&, const FibredDim&) = default;
};

struct FibredDocument {
  int nu = 1;
  std::vector<FibredDim> dims;
  friend bool operator==(const FibredDocument&, const FibredDocument&) = default;
};

using Document = std::variant<TruncatedNuSet, FibredDocument>;

inline bool is_indexed(const Document& d) { return std::holds_alternative<TruncatedNuSet>(d); }

// ---------------------------------------------------------------------------
// Reading

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

/// Schema errors carry no byte offset; they are reported at the start of the
/// document with the JSON path in the message.
[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw ParseError("schema: " + path + ": " + what, 1, 1);
}

inline const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, "missing field \"" + key + "\"");
  return *it;
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) schema_error(path, "integer out of range");
  return static_cast<int>(v);
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_strings(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline void only_fields(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) schema_error(path, "unexpected field \"" + k + "\"");
  }
}

inline int read_nu(const json& doc) {
  int nu = as_int(member(doc, "nu", ""), "/nu");
  if (nu < 1) schema_error("/nu", "must be at least 1");
  return nu;
}

inline TruncatedNuSet read_indexed(const json& doc) {
  only_fields(doc, {"levels", "nu"}, "");
  int nu = read_nu(doc);
  const json& levels = member(doc, "levels", "");
  if (!levels.is_array()) schema_error("/levels", "expected an array");
  TruncatedNuSet D{Arity(nu)};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::string path = "/levels/" + std::to_string(i);
    only_fields(levels[i], {"dim", "fibers"}, path);
    LevelFamily E;
    E.level = as_int(member(levels[i], "dim", path), path + "/dim");
    const json& fibers = member(levels[i], "fibers", path);
    if (!fibers.is_object()) schema_error(path + "/fibers", "expected an object");
    for (const auto& [key, labels] : fibers.items()) E.fibers[key] = as_strings(labels, path + "/fibers/" + key);
    D.push_level(std::move(E));
  }
  return D;
}

inline FibredDocument read_fibred(const json& doc) {
  only_fields(doc, {"dims", "nu"}, "");
  FibredDocument F;
  F.nu = read_nu(doc);
  const json& dims = member(doc, "dims", "");
  if (!dims.is_array()) schema_error("/dims", "expected an array");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    std::string path = "/dims/" + std::to_string(i);
    only_fields(dims[i], {"dim", "elements", "faces"}, path);
    FibredDim d;
    d.dim = as_int(member(dims[i], "dim", path), path + "/dim");
    d.elements = as_strings(member(dims[i], "elements", path), path + "/elements");
    const json& faces = member(dims[i], "faces", path);
    if (!faces.is_object()) schema_error(path + "/faces", "expected an object");
    for (const auto& [key, map] : faces.items()) {
      if (!map.is_object()) schema_error(path + "/faces/" + key, "expected an object");
      auto& out = d.faces[key];
      for (const auto& [from, to] : map.items()) out[from] = as_string(to, path + "/faces/" + key + "/" + from);
    }
    F.dims.push_back(std::move(d));
  }
  return F;
}

} // namespace detail

/// Parses either document kind, told apart by the "levels" / "dims" field.
inline Document parse_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = detail::line_column(text, e.byte);
    std::string msg = e.what();
    auto cut = msg.find("syntax error");
    throw ParseError(cut == std::string::npos ? msg : msg.substr(cut), line, column);
  }
  if (!doc.is_object()) detail::schema_error("", "expected an object");
  bool levels = doc.contains("levels"), dims = doc.contains("dims");
  if (levels == dims) detail::schema_error("", "expected exactly one of \"levels\" (indexed) or \"dims\" (fibred)");
  if (levels) return detail::read_indexed(doc);
  return detail::read_fibred(doc);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("cannot write " + path);
}

// ---------------------------------------------------------------------------
// Printing

inline json to_json(const TruncatedNuSet& D) {
  json levels = json::array();
  for (const LevelFamily& E : D.levels()) {
    json fibers = json::object();
    for (const auto& [key, labels] : E.fibers) fibers[key] = labels;
    levels.push_back({{"dim", E.level}, {"fibers", fibers}});
  }
  return {{"levels", levels}, {"nu", D.nu().value()}};
}

inline json to_json(const FibredDocument& F) {
  json dims = json::array();
  for (const FibredDim& d : F.dims) {
    json faces = json::object();
    for (const auto& [key, map] : d.faces) {
      json m = json::object();
      for (const auto& [from, to] : map) m[from] = to;
      faces[key] = m;
    }
    dims.push_back({{"dim", d.dim}, {"elements", d.elements}, {"faces", faces}});
  }
  return {{"dims", dims}, {"nu", F.nu}};
}

inline std::string print(const json& j) { return j.dump(2) + "\n"; }
inline std::string print(const TruncatedNuSet& D) { return print(to_json(D)); }
inline std::string print(const FibredDocument& F) { return print(to_json(F)); }
inline std::string print(const Document& d) {
  return std::visit([](const auto& x) { return print(x); }, d);
}

// ---------------------------------------------------------------------------
// Fibred document <-> FibredSet

inline FibredDocument to_document(const FibredSet& X) {
  FibredDocument F;
  F.nu = X.nu;
  for (int n = 0; n < X.dims(); ++n) {
    FibredDim d;
    d.dim = n;
    d.elements = X.cells[static_cast<std::size_t>(n)];
    for (const auto& [f, tab] : X.faces[static_cast<std::size_t>(n)]) {
      auto& m = d.faces[std::to_string(f.q) + "," + std::to_string(f.eps)];
      for (std::size_t i = 0; i < tab.size(); ++i) m[d.elements[i]] = X.cells[static_cast<std::size_t>(n - 1)][tab[i]];
    }
    F.dims.push_back(std::move(d));
  }
  return F;
}

/// Resolves names to indices. Problems (dimension numbering, unknown face
/// keys, missing or dangling entries) go to the report; the set is only
/// meaningful when the report is clean.
inline FibredSet to_fibred_set(const FibredDocument& F, IdentityReport& report) {
  FibredSet X;
  X.nu = F.nu;
  std::vector<std::map<std::string, std::uint32_t>> index;
  for (std::size_t i = 0; i < F.dims.size(); ++i) {
    const FibredDim& d = F.dims[i];
    auto n = static_cast<int>(i);
    std::string where = "dimension " + std::to_string(n);
    if (d.dim != n) report.fail("entry " + std::to_string(i) + " has dim " + std::to_string(d.dim) + ", expected " + std::to_string(n));
    X.cells.push_back(d.elements);
    std::map<std::string, std::uint32_t> ix;
    for (std::uint32_t k = 0; k < d.elements.size(); ++k) ix.emplace(d.elements[k], k);
    std::map<FaceIndex, std::vector<std::uint32_t>> table;
    for (const auto& [key, map] : d.faces) {
      FaceIndex f{-1, -1};
      auto comma = key.find(',');
      try {
        if (comma != std::string::npos) {
          std::size_t used_q = 0, used_e = 0;
          f.q = std::stoi(key.substr(0, comma), &used_q);
          f.eps = std::stoi(key.substr(comma + 1), &used_e);
          if (used_q != comma || used_e != key.size() - comma - 1) f = {-1, -1};
        }
      } catch (const std::exception&) {
        f = {-1, -1};
      }
      if (f.q < 0 || f.q >= n || f.eps < 0 || f.eps >= F.nu) {
        report.fail(where + ": face key \"" + key + "\" is out of range");
        continue;
      }
      auto& tab = table[f];
      tab.assign(d.elements.size(), std::numeric_limits<std::uint32_t>::max());
      for (const auto& [from, to] : map) {
        auto src = ix.find(from);
        if (src == ix.end()) {
          report.fail(where + ": face " + key + " mentions unknown element " + from);
          continue;
        }
        auto dst = index[i - 1].find(to);
        if (dst == index[i - 1].end()) {
          report.fail(where + ": face " + key + " of " + from + " is " + to + ", not an element of dimension " + std::to_string(n - 1));
          continue;
        }
        tab[src->second] = dst->second;
      }
      for (std::uint32_t k = 0; k < tab.size(); ++k)
        if (tab[k] == std::numeric_limits<std::uint32_t>::max() && map.count(d.elements[k]) == 0)
          report.fail(where + ": face " + key + " of " + d.elements[k] + " is missing");
    }
    X.faces.push_back(std::move(table));
    index.push_back(std::move(ix));
  }
  if (report.ok()) {
    IdentityReport s = check_structure(X);
    for (const auto& v : s.violations) report.fail(v);
    for (std::size_t k = s.violations.size(); k < s.violation_count; ++k) report.fail("(further structural problem)");
  }
  return X;
}

// ---------------------------------------------------------------------------
// Generator

/// SplitMix64: 64-bit state, one 64-bit output per step.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, bound) by rejection of the top partial block.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw DataError("below(0)");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
      std::uint64_t x = next();
      if (x < limit) return x % bound;
    }
  }

private:
  std::uint64_t state_;
};

struct GeneratorConfig {
  int nu = 2;
  int depth = 2;
  int max_fiber = 2;
  std::uint64_t seed = 0;
};

/// Level by level: fullframes in key order, each given 1 + below(max_fiber)
/// elements named x<level>_<j> with j counting through the level.
inline TruncatedNuSet generate(const GeneratorConfig& cfg) {
  if (cfg.depth < 0) throw DataError("depth must be >= 0");
  if (cfg.max_fiber < 1) throw DataError("max-fiber must be >= 1");
  SplitMix64 rng(cfg.seed);
  TruncatedNuSet D{Arity(cfg.nu)};
  for (int k = 0; k < cfg.depth; ++k) {
    LevelFamily E;
    E.level = k;
    std::size_t j = 0;
    for (const Frame& d : enumerate_fullframe(D, k)) {
      auto size = 1 + rng.below(static_cast<std::uint64_t>(cfg.max_fiber));
      std::vector<std::string> labels;
      for (std::uint64_t i = 0; i < size; ++i) labels.push_back("x" + std::to_string(k) + "_" + std::to_string(j++));
      std::sort(labels.begin(), labels.end());
      E.fibers[d.key()] = std::move(labels);
    }
    D.push_level(std::move(E));
  }
  return D;
}

} // namespace nuset::io
