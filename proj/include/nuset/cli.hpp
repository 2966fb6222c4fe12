#pragma once

// Command-line surface. run() never touches std::cout or std::exit, so the
// test suite drives it directly.
//
// Exit codes: 0 valid, 1 semantically invalid, 2 parse error or bad flags.

#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nuset/concrete.hpp"
#include "nuset/fibred.hpp"
#include "nuset/io.hpp"
#include "nuset/staged.hpp"
#include "nuset/symbolic.hpp"

namespace nuset::cli {

enum Exit : int { ok = 0, invalid = 1, usage = 2 };

class UsageError : public Error {
public:
  using Error::Error;
};

struct Options {
  std::string format = "text";
  bool ascii = false;
  bool trace = false;

  std::string input, output, to;
  int nu = 0, level = 0, depth = 0, max_fiber = 1;
  std::optional<int> rank;
  bool cells = false;
  std::uint64_t seed = 0;
};

namespace detail {

using json = nlohmann::json;

inline void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

inline void text_only(const Options& o, const char* command) {
  if (o.format == "dot") throw UsageError(std::string("--format dot is not available for ") + command);
}

inline io::Document load(const Options& o) {
  std::string text;
  try {
    text = io::read_file(o.input);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  return io::parse_document(text);
}

/// Outcome of checking a document of either kind.
struct Checked {
  bool valid = false;
  std::vector<std::string> problems;
  std::optional<TruncatedNuSet> indexed;  // set whenever the document is valid
  std::optional<FibredSet> fibred;        // set for valid fibred documents
  json summary;
  std::vector<std::string> summary_lines;
};

inline Checked check_document(const io::Document& doc) {
  Checked c;
  if (const auto* D = std::get_if<TruncatedNuSet>(&doc)) {
    ValidationReport r = validate(*D);
    c.valid = r.valid();
    if (!c.valid) {
      for (const auto& i : r.issues) c.problems.push_back("level " + std::to_string(i.level) + ": " + i.kind + ": " + i.detail);
      for (const auto& f : r.sweep.failures) c.problems.push_back("coherence: " + f);
      if (r.sweep.failure_count > r.sweep.failures.size())
        c.problems.push_back("coherence: ... " + std::to_string(r.sweep.failure_count - r.sweep.failures.size()) + " more");
      return c;
    }
    c.indexed = *D;
    json levels = json::array();
    c.summary_lines.push_back("valid indexed document: nu=" + std::to_string(D->nu().value()) + " depth=" + std::to_string(D->depth()));
    for (const LevelFamily& E : D->levels()) {
      levels.push_back({{"dim", E.level}, {"fibers", E.fibers.size()}, {"elements", E.element_count()}});
      c.summary_lines.push_back("  level " + std::to_string(E.level) + ": " + std::to_string(E.fibers.size()) + " fibers, " +
                                std::to_string(E.element_count()) + " elements");
    }
    c.summary_lines.push_back("  sweep: " + std::to_string(r.sweep.frame_checks) + " frame, " +
                              std::to_string(r.sweep.painting_checks) + " painting, " +
                              std::to_string(r.sweep.membership_checks) + " membership checks");
    c.summary = {{"valid", true},
                 {"kind", "indexed"},
                 {"nu", D->nu().value()},
                 {"depth", D->depth()},
                 {"levels", levels},
                 {"sweep",
                  {{"frame_checks", r.sweep.frame_checks},
                   {"painting_checks", r.sweep.painting_checks},
                   {"membership_checks", r.sweep.membership_checks}}}};
    return c;
  }

  const auto& F = std::get<io::FibredDocument>(doc);
  IdentityReport r;
  FibredSet X = io::to_fibred_set(F, r);
  if (r.ok()) r = check_identities(X);
  if (!r.ok()) {
    c.problems = r.violations;
    if (r.violation_count > r.violations.size())
      c.problems.push_back("... " + std::to_string(r.violation_count - r.violations.size()) + " more");
    return c;
  }
  try {
    c.indexed = to_indexed(X);
  } catch (const Error& e) {
    c.problems.push_back(e.what());
    return c;
  }
  c.valid = true;
  c.fibred = X;
  json dims = json::array();
  c.summary_lines.push_back("valid fibred document: nu=" + std::to_string(X.nu) + " dims=" + std::to_string(X.dims()));
  for (int n = 0; n < X.dims(); ++n) {
    dims.push_back({{"dim", n}, {"cells", X.count(n)}, {"faces_per_cell", X.faces[static_cast<std::size_t>(n)].size()}});
    c.summary_lines.push_back("  dimension " + std::to_string(n) + ": " + std::to_string(X.count(n)) + " cells, " +
                              std::to_string(X.faces[static_cast<std::size_t>(n)].size()) + " faces each");
  }
  c.summary_lines.push_back("  identities: " + std::to_string(r.checks) + " checks");
  c.summary = {{"valid", true}, {"kind", "fibred"}, {"nu", X.nu}, {"dims", dims}, {"identity_checks", r.checks}};
  return c;
}

inline int report_invalid(const Options& o, const Checked& c, std::ostream& out) {
  if (o.format == "json") {
    emit_json(out, {{"valid", false}, {"problems", c.problems}});
  } else {
    out << "invalid document\n";
    for (const auto& p : c.problems) out << "  " << p << "\n";
  }
  return invalid;
}

/// Runs the staged construction; returns the trace and the error, if any.
inline std::pair<std::vector<std::string>, std::optional<std::string>> staged_run(const TruncatedNuSet& D) {
  std::vector<std::string> trace;
  try {
    staged::build_tower(D, &trace);
    return {trace, std::nullopt};
  } catch (const Error& e) {
    return {trace, std::string(e.what())};
  }
}

// ---------------------------------------------------------------------------

inline int cmd_signature(const Options& o, std::ostream& out) {
  text_only(o, "signature");
  json sigs = json::array();
  for (int k = 0; k <= o.level; ++k) {
    sym::Signature s = sym::signature(Arity(o.nu), k);
    if (o.format == "json")
      sigs.push_back({{"level", k}, {"text", s.render(o.ascii)}, {"domain", sym::to_json(s.domain)}});
    else
      out << s.render(o.ascii) << "\n";
  }
  if (o.format == "json") emit_json(out, {{"nu", o.nu}, {"signatures", sigs}});
  return ok;
}

inline int cmd_enumerate(const Options& o, std::ostream& out) {
  text_only(o, "enumerate");
  Checked c = check_document(load(o));
  if (!c.valid) return report_invalid(o, c, out);
  const TruncatedNuSet& D = *c.indexed;
  int p = o.rank.value_or(o.cells ? 0 : o.level);
  if (o.cells) {
    if (o.level >= D.depth())
      throw UsageError("--cells needs --level below the depth " + std::to_string(D.depth()));
    if (o.rank) throw UsageError("--cells and --rank are exclusive");
  } else if (o.level > D.depth() || p < 0 || p > o.level) {
    throw UsageError("need 0 <= rank <= level <= depth (" + std::to_string(D.depth()) + ")");
  }
  std::vector<std::string> keys;
  if (o.cells) {
    Enumerator en(D);
    for (const Painting& x : en.cells(o.level)) keys.push_back(x.key());
  } else {
    for (const Frame& d : enumerate_frames(D, o.level, p)) keys.push_back(d.key());
  }
  if (o.format == "json") {
    json j = {{"level", o.level}, {"count", keys.size()}};
    if (o.cells)
      j["cells"] = keys;
    else
      j["rank"] = p, j["frames"] = keys;
    emit_json(out, j);
  } else {
    out << (o.cells ? "cells" : "frames") << " at level " << o.level << (o.cells ? "" : ", rank " + std::to_string(p)) << ": "
        << keys.size() << "\n";
    for (const auto& k : keys) out << k << "\n";
  }
  return ok;
}

inline int cmd_check(const Options& o, std::ostream& out) {
  text_only(o, "check");
  Checked c = check_document(load(o));
  std::vector<std::string> trace;
  if (o.trace && c.indexed) trace = staged_run(*c.indexed).first;
  if (!c.valid) return report_invalid(o, c, out);
  if (o.format == "json") {
    json j = c.summary;
    if (o.trace) j["trace"] = trace;
    emit_json(out, j);
  } else {
    for (const auto& t : trace) out << t << "\n";
    for (const auto& l : c.summary_lines) out << l << "\n";
  }
  return ok;
}

inline int cmd_convert(const Options& o, std::ostream& out) {
  if (o.format == "dot" && o.to != "fibred") throw UsageError("--format dot needs --to fibred");
  Checked c = check_document(load(o));
  if (!c.valid) return report_invalid(o, c, out);
  std::string text;
  if (o.to == "indexed") {
    text = io::print(*c.indexed);
  } else {
    FibredSet X = c.fibred ? *c.fibred : to_fibred(*c.indexed);
    text = o.format == "dot" ? to_dot(X) : io::print(io::to_document(X));
  }
  if (o.output.empty()) {
    out << text;
  } else {
    try {
      io::write_file(o.output, text);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    if (o.format == "json")
      emit_json(out, {{"written", o.output}, {"to", o.to}});
    else
      out << "wrote " << o.to << " document to " << o.output << "\n";
  }
  return ok;
}

inline int cmd_coherence(const Options& o, std::ostream& out) {
  text_only(o, "coherence");
  sym::CohSweep s = sym::sweep_coh_refl(Arity(o.nu), o.level, true);
  if (o.format == "json") {
    emit_json(out, {{"nu", o.nu}, {"max_level", o.level}, {"tuples", s.tuples}, {"failures", s.failures}, {"failed", s.failed}});
  } else {
    out << "coherence nu=" << o.nu << " levels 0.." << o.level << ": " << s.tuples << " tuples checked, " << s.failures
        << " failures\n";
    for (const auto& f : s.failed) out << "  not reflexive: " << f << "\n";
  }
  return s.ok() ? ok : invalid;
}

inline int cmd_generate(const Options& o, std::ostream& out) {
  text_only(o, "generate");
  TruncatedNuSet D = io::generate({o.nu, o.depth, o.max_fiber, o.seed});
  std::string text = io::print(D);
  if (o.output.empty()) {
    out << text;
    return ok;
  }
  try {
    io::write_file(o.output, text);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  std::vector<std::size_t> counts;
  for (const LevelFamily& E : D.levels()) counts.push_back(E.element_count());
  if (o.format == "json") {
    emit_json(out, {{"written", o.output}, {"elements", counts}});
  } else {
    out << "wrote " << o.output << ": nu=" << o.nu << " depth=" << o.depth << " elements per level";
    for (auto n : counts) out << " " << n;
    out << "\n";
  }
  return ok;
}

inline int cmd_build(const Options& o, std::ostream& out) {
  text_only(o, "build");
  io::Document doc = load(o);
  std::optional<TruncatedNuSet> D;
  if (const auto* d = std::get_if<TruncatedNuSet>(&doc)) {
    D = *d;
  } else {
    Checked c = check_document(doc);
    if (!c.valid) return report_invalid(o, c, out);
    D = c.indexed;
  }
  auto [trace, error] = staged_run(*D);
  if (o.format == "json") {
    json j = {{"built", !error}, {"levels", D->depth()}, {"trace", trace}};
    if (error) j["error"] = *error;
    emit_json(out, j);
  } else {
    if (o.trace || error)
      for (const auto& t : trace) out << t << "\n";
    if (error)
      out << "build failed: " << *error << "\n";
    else
      out << "built " << D->depth() << " levels\n";
  }
  return error ? invalid : ok;
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite nu-sets: signatures, enumeration, checks, conversions and staged builds.\n"
               "For nu = 1, dimension n holds the (n-1)-simplices; dimension 0 is the augmentation."};
  app.name("nuset");
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "dot"}));
  app.add_flag("--ascii", o.ascii, "ASCII glyphs in signatures");
  app.add_flag("--trace", o.trace, "Print the stage trace");

  auto nu_opt = [&](CLI::App* s) { s->add_option("--nu", o.nu, "Arity")->required()->check(CLI::Range(1, 16)); };

  CLI::App* signature = app.add_subcommand("signature", "Print the type of E_k for k = 0..level");
  nu_opt(signature);
  signature->add_option("--level", o.level, "Highest level")->required()->check(CLI::Range(0, 12));

  CLI::App* enumerate = app.add_subcommand("enumerate", "List frames of a given level and rank, or the cells of a level");
  enumerate->add_option("--input", o.input, "Document")->required();
  enumerate->add_option("--level", o.level, "Level n")->required()->check(CLI::NonNegativeNumber);
  enumerate->add_option("--rank", o.rank, "Rank p (defaults to n)")->check(CLI::NonNegativeNumber);
  enumerate->add_flag("--cells", o.cells, "List total cells instead of frames");

  CLI::App* check = app.add_subcommand("check", "Validate an indexed or fibred document");
  check->add_option("--input", o.input, "Document")->required();

  CLI::App* convert = app.add_subcommand("convert", "Convert between indexed and fibred form");
  convert->add_option("--input", o.input, "Document")->required();
  convert->add_option("--to", o.to, "Target form")->required()->check(CLI::IsMember({"indexed", "fibred"}));
  convert->add_option("--output", o.output, "Output file (stdout when absent)");

  CLI::App* coherence = app.add_subcommand("coherence", "Check that every coherence normalizes to reflexivity");
  nu_opt(coherence);
  coherence->add_option("--level", o.level, "Highest level")->required()->check(CLI::Range(0, 8));

  CLI::App* generate = app.add_subcommand("generate", "Write a seeded random indexed document");
  nu_opt(generate);
  generate->add_option("--depth", o.depth, "Number of levels")->required()->check(CLI::Range(0, 6));
  generate->add_option("--max-fiber", o.max_fiber, "Largest fiber size")->required()->check(CLI::Range(1, 64));
  generate->add_option("--seed", o.seed, "64-bit seed")->required();
  generate->add_option("--output", o.output, "Output file (stdout when absent)");

  CLI::App* build = app.add_subcommand("build", "Run the staged construction");
  build->add_option("--input", o.input, "Document")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }

  try {
    if (*signature) return detail::cmd_signature(o, out);
    if (*enumerate) return detail::cmd_enumerate(o, out);
    if (*check) return detail::cmd_check(o, out);
    if (*convert) return detail::cmd_convert(o, out);
    if (*coherence) return detail::cmd_coherence(o, out);
    if (*generate) return detail::cmd_generate(o, out);
    if (*build) return detail::cmd_build(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return usage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return invalid;
  }
  return usage;
}

} // namespace nuset::cli
