#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "error.hpp"
#include "growth_table.hpp"
#include "jlp.hpp"
#include "language.hpp"
#include "lower_bound.hpp"
#include "quotient.hpp"
#include "serialization.hpp"
#include "subshift.hpp"

namespace lefg::cli {

inline constexpr const char* kVersion = "lefgrowth 1.0.0";

inline std::string version_digest() { return hex64(fnv1a64(kVersion)); }

struct RunConfig {
  std::string verb;
  std::string source_path;
  std::string gens_path;
  std::string quotient_path;
  std::string out;  // file or directory, verb dependent
  std::string dir;
  std::string upper_path, lower_path;
  int n_max = 20;
  int m = 0;
  int radius = 0;
  int ball = 0;
  std::vector<int> radii;
  std::vector<int> m_list;
  double jlp_r = 2.0;
  std::int64_t jlp_x = 30;
  std::optional<std::int64_t> toy_cap;
  int levels = 1;
  std::uint64_t seed = 1;
  std::size_t scan_budget = 50'000'000;
  Budget budget;
  int workers = 1;
  bool json = false;
};

struct RunReport {
  std::vector<std::string> command;
  std::vector<std::string> tables;
  std::vector<std::string> certificates;
  std::vector<std::string> inexact;
  std::vector<std::string> notes;
  bool toy = false;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  int exit_code = 0;
  std::string error;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["version_digest"] = version_digest();
    j["tables"] = tables;
    j["certificates"] = certificates;
    j["inexact"] = inexact;
    j["toy"] = toy;
    j["notes"] = notes;
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [k, v] : timings) t[k] = v;
    j["timings_s"] = t;
    j["exit_code"] = exit_code;
    if (!error.empty()) j["error"] = error;
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << kVersion << " (" << version_digest() << ")\n";
    for (const auto& t : tables) os << "table: " << t << "\n";
    for (const auto& c : certificates) os << "certificate: " << c << "\n";
    for (const auto& i : inexact) os << "INEXACT: " << i << "\n";
    if (toy) os << "toy mode\n";
    for (const auto& n : notes) os << n << "\n";
    for (const auto& [k, v] : timings) os << "time " << k << ": " << format_real(v) << " s\n";
    if (!error.empty()) os << "error: " << error << "\n";
    os << "exit " << exit_code << "\n";
    return os.str();
  }
};

namespace detail {

class Stopwatch {
public:
  Stopwatch(RunReport& rep, std::string name) : rep_(rep), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    std::chrono::duration<double> d = std::chrono::steady_clock::now() - t0_;
    rep_.timings.emplace_back(name_, d.count());
  }

private:
  RunReport& rep_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

inline std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  auto x = std::strtoull(v, &end, 10);
  if (*end != '\0' || x == 0) throw PreconditionError(std::string(name) + " must be a positive integer");
  return static_cast<std::size_t>(x);
}

inline void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw PreconditionError(std::string(flag) + " is required");
  if (!std::filesystem::is_regular_file(path)) throw PreconditionError(std::string(flag) + ": no such file '" + path + "'");
}

struct Context {
  LoadedSource loaded;
  std::shared_ptr<Subshift> ss;
};

inline Context open_source(const RunConfig& c) {
  require_file(c.source_path, "--source");
  Context ctx;
  ctx.loaded = load_source_file(c.source_path, c.budget);
  ctx.ss = make_subshift(ctx.loaded.source, c.budget);
  return ctx;
}

inline void emit(const RunConfig& c, std::ostream& out, const std::string& text, const std::string& default_name = {}) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::filesystem::path p(c.out);
  if (!default_name.empty() && std::filesystem::is_directory(p)) p /= default_name;
  write_file(p.string(), text);
}

inline std::string table_text(const RunConfig& c, const GrowthTable& t) { return c.json ? t.to_json().dump(2) + "\n" : t.to_csv(); }

inline void note_inexact(RunReport& rep, const GrowthTable& t, const std::string& name) {
  for (const auto& r : t.rows())
    if (!r.exact) rep.inexact.push_back(name + " at n = " + std::to_string(r.n));
}

inline void ensure_dir(const std::string& d) {
  if (d.empty()) throw PreconditionError("--out directory is required");
  std::filesystem::create_directories(d);
}

inline std::string join(const std::filesystem::path& d, const std::string& f) { return (d / f).string(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Plot data

struct PlotFiles {
  std::string upper_dat, lower_dat, bundle;
};

/// Two-column data files plus a JSON bundle sharing the radius axis.
inline PlotFiles emit_plot_data(const std::vector<GrowthTable>& tables, const std::string& dir) {
  if (tables.empty()) throw PreconditionError("no tables to plot");
  const GrowthTable* upper = nullptr;
  const GrowthTable* lower = nullptr;
  for (const auto& t : tables) {
    if (t.empty()) throw PreconditionError("empty table");
    if (t.meaning() == Meaning::quotient_log_order) upper = &t;
    else if (t.meaning() == Meaning::lower_bound_exponent) lower = &t;
    else throw PreconditionError(std::string("table meaning '") + to_string(t.meaning()) + "' is not on the radius axis");
  }
  std::filesystem::create_directories(dir);
  PlotFiles files;
  nlohmann::ordered_json bundle;
  bundle["axis"] = "radius";
  auto dat = [](const GrowthTable& t, const std::string& label) {
    std::string s = "# n " + label + "\n";
    for (const auto& r : t.rows()) s += std::to_string(r.n) + " " + format_real(r.value) + "\n";
    return s;
  };
  if (upper) {
    files.upper_dat = detail::join(dir, "upper.dat");
    write_file(files.upper_dat, dat(*upper, "log_M_factorial"));
    bundle["upper"] = upper->to_json();
  }
  if (lower) {
    files.lower_dat = detail::join(dir, "lower.dat");
    write_file(files.lower_dat, dat(*lower, "c_p_2m_minus_7"));
    bundle["lower"] = lower->to_json();
  }
  nlohmann::ordered_json matched = nlohmann::ordered_json::array();
  std::vector<std::int64_t> violations;
  if (upper && lower)
    for (const auto& r : lower->rows())
      if (const auto* u = upper->find(r.n)) {
        matched.push_back({{"n", r.n}, {"lower", std::stod(format_real(r.value))}, {"upper", std::stod(format_real(u->value))}});
        if (r.value > u->value) violations.push_back(r.n);
      }
  bundle["matched"] = matched;
  bundle["sandwich_violations"] = violations;
  files.bundle = detail::join(dir, "bundle.json");
  write_file(files.bundle, bundle.dump(2) + "\n");
  if (!violations.empty())
    throw ConsistencyError("lower bound exceeds upper bound at n = " + std::to_string(violations.front()));
  return files;
}

inline GrowthTable load_table(const std::string& path) {
  auto text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return GrowthTable::from_json(parse_json(text, path));
  throw PreconditionError(path + ": plot inputs must be table JSON (meaning is needed)");
}

// ---------------------------------------------------------------------------
// Verbs

namespace verbs {

inline void language_table(const RunConfig& c, RunReport& rep, std::ostream& out, Meaning meaning) {
  if (c.n_max < 1) throw PreconditionError("--n-max must be positive");
  auto ctx = detail::open_source(c);
  GrowthTable t(meaning);
  {
    detail::Stopwatch sw(rep, to_string(meaning));
    if (meaning == Meaning::entropy_estimate) {
      auto e = entropy_estimate(*ctx.loaded.source, static_cast<std::size_t>(c.n_max), c.budget);
      for (std::size_t n = 0; n < e.sequence.size(); ++n) t.add(static_cast<std::int64_t>(n + 1), e.sequence[n], e.exact);
    } else {
      for (int n = 1; n <= c.n_max; ++n) {
        auto v = meaning == Meaning::complexity ? complexity(*ctx.loaded.source, static_cast<std::size_t>(n), c.budget)
                                                : recurrence(*ctx.loaded.source, static_cast<std::size_t>(n), c.budget);
        t.add(n, static_cast<double>(v.value), v.exact);
      }
    }
  }
  auto problems = check_invariants(t, ctx.loaded.source->alphabet().size());
  if (!problems.empty()) throw ConsistencyError(problems.front());
  detail::note_inexact(rep, t, to_string(meaning));
  rep.tables.push_back(std::string(to_string(meaning)) + " (" + std::to_string(t.rows().size()) + " rows)");
  detail::emit(c, out, detail::table_text(c, t), std::string(to_string(meaning)) + (c.json ? ".json" : ".csv"));
}

inline void cylinders_verb(const RunConfig& c, RunReport& rep, std::ostream& out) {
  auto ctx = detail::open_source(c);
  auto cyl = cylinders(*ctx.loaded.source, c.m, c.budget);
  if (!cyl.exact) rep.inexact.push_back("cylinder list at m = " + std::to_string(c.m));
  std::string text;
  if (c.json) {
    ojson words = ojson::array();
    for (const auto& w : cyl.value) words.push_back(w.word);
    text = ojson{{"m", c.m}, {"exact", cyl.exact}, {"count", cyl.value.size()}, {"words", words}}.dump(2) + "\n";
  } else {
    for (const auto& w : cyl.value) text += w.word + "\n";
  }
  rep.notes.push_back(std::to_string(cyl.value.size()) + " cylinders at m = " + std::to_string(c.m));
  detail::emit(c, out, text, "cylinders.txt");
}

inline void quotient_verb(const RunConfig& c, RunReport& rep, std::ostream& out) {
  if (c.radius < 1) throw PreconditionError("--radius must be at least 1");
  auto ctx = detail::open_source(c);
  detail::require_file(c.gens_path, "--gens");
  auto s = load_generators_file(*ctx.ss, c.gens_path);
  PermutationQuotient q;
  {
    detail::Stopwatch sw(rep, "quotient");
    q = build_quotient(*ctx.ss, s, c.radius);
  }
  auto iso = local_colour_iso_check(s, q, c.radius);
  if (!iso.ok) throw ConsistencyError("local colour isomorphism fails at n = " + std::to_string(*iso.witness) + ": " + iso.reason);
  rep.certificates.push_back("quotient M = " + std::to_string(q.M) + ", C1 = " + std::to_string(q.C1) + ", r = " + std::to_string(q.r));
  detail::emit(c, out, quotient_to_json(q).dump() + "\n", "quotient.json");
}

inline void certify_verb(const RunConfig& c, RunReport& rep, std::ostream& out) {
  detail::require_file(c.quotient_path, "--quotient");
  auto q = quotient_from_json(parse_json(read_file(c.quotient_path), c.quotient_path));
  auto ctx = detail::open_source(c);
  if (q.source_digest != ctx.ss->digest())
    throw PreconditionError("quotient was built for source " + q.source_digest + ", not " + ctx.ss->digest());
  detail::require_file(c.gens_path, "--gens");
  auto s = load_generators_file(*ctx.ss, c.gens_path);
  if (auto bad = quotient_mismatch(s, q)) throw CertificateFailure("quotient does not reduce the generators: " + *bad);
  LocalEmbeddingCertificate cert;
  {
    detail::Stopwatch sw(rep, "certify");
    cert = certify_local_embedding(s, q, c.ball, c.budget.ball);
  }
  rep.certificates.push_back("local embedding of the radius-" + std::to_string(c.ball) + " ball (" +
                             std::to_string(cert.ball_size) + " elements) into Sym(" + std::to_string(q.M) + ")");
  detail::emit(c, out, certificate_to_json(cert).dump(2) + "\n", "certificate.json");
}

inline void dcyl_verb(const RunConfig& c, RunReport& rep, std::ostream& out) {
  auto ctx = detail::open_source(c);
  auto fam = greedy_dcyl(*ctx.ss, c.m);
  if (!verify_family(*ctx.ss, fam)) throw ConsistencyError("greedy family fails the disjointness check");
  auto j = family_to_json(fam);
  j["bound"] = (ctx.ss->complexity(static_cast<std::size_t>(2 * c.m - 7)) + 8) / 9;
  rep.certificates.push_back("DCyl family of size " + std::to_string(fam.members.size()) + " at m = " + std::to_string(c.m));
  detail::emit(c, out, j.dump(2) + "\n", "dcyl.json");
}

inline void lower_bound_verb(const RunConfig& c, RunReport& rep, std::ostream& out) {
  if (c.m_list.empty()) throw PreconditionError("--m-list must not be empty");
  auto ctx = detail::open_source(c);
  detail::require_file(c.gens_path, "--gens");
  auto s = load_generators_file(*ctx.ss, c.gens_path);
  const int C0 = compute_C0(*ctx.ss);
  LowerGrowth g;
  {
    detail::Stopwatch sw(rep, "lower-bound");
    g = growth_lower_datapoints(*ctx.ss, s, C0, c.m_list);
  }
  rep.tables.push_back("lower-bound-exponent (" + std::to_string(g.table.rows().size()) + " rows)");
  if (c.out.empty()) {
    out << detail::table_text(c, g.table);
    return;
  }
  detail::ensure_dir(c.out);
  write_file(detail::join(c.out, "lower_bound.csv"), g.table.to_csv());
  write_file(detail::join(c.out, "lower_bound.json"), g.table.to_json().dump(2) + "\n");
  FWordBuilder builder(*ctx.ss, s, C0);
  WordEvaluator eval(s);
  for (int m : g.m_values) {
    auto fam = greedy_dcyl(*ctx.ss, m);
    ojson blocks = ojson::array();
    for (const auto& u : fam.members) blocks.push_back(block_to_json(build_delta_U(*ctx.ss, builder, eval, u), s));
    ojson manifest{{"m", m}, {"family", family_to_json(fam)}, {"blocks", blocks}};
    write_file(detail::join(c.out, "blocks_m" + std::to_string(m) + ".json"), manifest.dump(2) + "\n");
  }
}

inline void growth_verb(const RunConfig& c, RunReport& rep, std::ostream& out) {
  if (c.radii.empty()) throw PreconditionError("--radii must not be empty");
  for (int r : c.radii)
    if (r < 1) throw PreconditionError("radii must be positive");
  auto ctx = detail::open_source(c);
  detail::require_file(c.gens_path, "--gens");
  auto s = load_generators_file(*ctx.ss, c.gens_path);
  UpperGrowth g;
  {
    detail::Stopwatch sw(rep, "growth");
    g = growth_upper_datapoints(*ctx.ss, s, c.radii);
  }
  detail::note_inexact(rep, g.degree, "quotient degree");
  rep.tables.push_back("quotient-degree (" + std::to_string(g.degree.rows().size()) + " rows)");
  rep.tables.push_back("quotient-log-order (" + std::to_string(g.log_order.rows().size()) + " rows)");
  if (c.out.empty()) {
    out << detail::table_text(c, g.degree);
    return;
  }
  detail::ensure_dir(c.out);
  write_file(detail::join(c.out, "quotient_degree.csv"), g.degree.to_csv());
  write_file(detail::join(c.out, "quotient_degree.json"), g.degree.to_json().dump(2) + "\n");
  write_file(detail::join(c.out, "quotient_log_order.csv"), g.log_order.to_csv());
  write_file(detail::join(c.out, "quotient_log_order.json"), g.log_order.to_json().dump(2) + "\n");
}

inline JlpParams jlp_params(const RunConfig& c) {
  JlpParams p;
  p.r = c.jlp_r;
  p.x = c.jlp_x;
  p.levels = c.levels;
  p.seed = c.seed;
  p.toy_cap = c.toy_cap;
  p.validate();
  return p;
}

inline void jlp_build_verb(const RunConfig& c, RunReport& rep, std::ostream&) {
  auto p = jlp_params(c);
  rep.toy = p.toy();
  detail::ensure_dir(c.out);
  std::shared_ptr<const JlpFamily> fam;
  {
    detail::Stopwatch sw(rep, "jlp build");
    fam = std::make_shared<const JlpFamily>(build_family(p));
  }
  write_file(detail::join(c.out, "source.json"), jlp_params_to_json(p).dump(2) + "\n");
  for (const auto& lv : fam->levels()) {
    write_file(detail::join(c.out, "level_" + std::to_string(lv.j) + ".json"), level_manifest(*fam, lv).dump(2) + "\n");
    rep.notes.push_back("level " + std::to_string(lv.j) + ": N = " + std::to_string(lv.N) + ", l = " + std::to_string(lv.l) +
                        (lv.capped ? " (capped)" : ""));
  }
  auto src = jlp_word_source(fam);
  ojson anchors{{"K", src->anchors_k()}, {"M", src->anchors_m()}, {"exact_bound", src->exact_bound()}};
  write_file(detail::join(c.out, "anchors.json"), anchors.dump(2) + "\n");
}

inline void jlp_verify_verb(const RunConfig& c, RunReport& rep, std::ostream& out) {
  if (c.dir.empty()) throw PreconditionError("--dir is required");
  const std::string src_path = detail::join(c.dir, "source.json");
  detail::require_file(src_path, "--dir");
  auto p = jlp_params_from_json(parse_json(read_file(src_path), src_path));
  p.validate();
  rep.toy = p.toy();
  std::shared_ptr<const JlpFamily> fam;
  {
    detail::Stopwatch sw(rep, "jlp rebuild");
    fam = std::make_shared<const JlpFamily>(build_family(p));
  }
  ClauseReport all;
  for (const auto& lv : fam->levels()) {
    auto path = detail::join(c.dir, "level_" + std::to_string(lv.j) + ".json");
    detail::require_file(path, "--dir");
    auto stored = parse_json(read_file(path), path);
    auto fresh = nlohmann::json::parse(level_manifest(*fam, lv).dump());
    all.add("manifest " + std::to_string(lv.j) + " matches rebuild", stored == fresh);
  }
  auto merge = [&](const ClauseReport& r) { all.clauses.insert(all.clauses.end(), r.clauses.begin(), r.clauses.end()); };
  {
    detail::Stopwatch sw(rep, "jlp invariants");
    merge(verify_level_invariants(*fam));
    merge(check_complexity_lb(*fam));
  }
  auto src = jlp_word_source(fam);
  {
    detail::Stopwatch sw(rep, "jlp recurrence scan");
    for (int j = 0; j + 1 < static_cast<int>(fam->size()); ++j) {
      auto scan = check_recurrence_ub(*fam, *src, j, c.scan_budget);
      merge(scan.report);
    }
  }
  for (const auto& cl : all.clauses)
    if (cl.status == ClauseStatus::skipped) rep.inexact.push_back(cl.name + " skipped: " + cl.detail);
  ojson report{{"source", jlp_params_to_json(p)},
               {"passed", all.count(ClauseStatus::pass)},
               {"failed", all.count(ClauseStatus::fail)},
               {"skipped", all.count(ClauseStatus::skipped)},
               {"clauses", report_to_json(all)}};
  auto text = report.dump(2) + "\n";
  write_file(detail::join(c.dir, "verify_report.json"), text);
  if (c.json) out << text;
  rep.certificates.push_back(std::to_string(all.count(ClauseStatus::pass)) + " clauses passed, " +
                             std::to_string(all.count(ClauseStatus::fail)) + " failed");
  if (!all.ok()) {
    for (const auto& cl : all.clauses)
      if (cl.status == ClauseStatus::fail) throw CertificateFailure("clause failed: " + cl.name);
  }
}

inline void plot_verb(const RunConfig& c, RunReport& rep, std::ostream&) {
  std::vector<GrowthTable> tables;
  if (!c.upper_path.empty()) {
    detail::require_file(c.upper_path, "--upper");
    tables.push_back(load_table(c.upper_path));
  }
  if (!c.lower_path.empty()) {
    detail::require_file(c.lower_path, "--lower");
    tables.push_back(load_table(c.lower_path));
  }
  detail::ensure_dir(c.out);
  auto files = emit_plot_data(tables, c.out);
  rep.notes.push_back("bundle " + files.bundle);
}

}  // namespace verbs

/// Parses argv-style arguments (without the program name) and runs the verb.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  RunReport rep;
  rep.command = args;
  CLI::App app{"LEF growth toolkit for minimal subshifts", "lefgrowth"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.add_flag("--json", c.json, "machine-readable JSON output");
  app.add_option("--workers", c.workers, "reserved; all verbs currently run on one thread")->check(CLI::PositiveNumber);
  std::size_t window_budget = 0, ball_budget = 0;
  app.add_option("--window-budget", window_budget, "symbols per materialized window");
  app.add_option("--ball-budget", ball_budget, "elements per enumerated ball");

  auto source_opt = [&](CLI::App* sub) { sub->add_option("--source", c.source_path, "source descriptor JSON")->required(); };
  auto out_opt = [&](CLI::App* sub) { sub->add_option("--out", c.out, "output file or directory"); };
  auto json_flag = [&](CLI::App* sub) { sub->add_flag("--json", c.json, "machine-readable JSON output"); };

  for (const char* v : {"complexity", "recurrence", "entropy"}) {
    auto* sub = app.add_subcommand(v, std::string(v) + " table for n = 1..n-max");
    source_opt(sub);
    sub->add_option("--n-max,-n", c.n_max, "largest n");
    out_opt(sub);
    json_flag(sub);
  }
  auto* cyl = app.add_subcommand("cylinders", "list the m-cylinders");
  source_opt(cyl);
  cyl->add_option("-m", c.m, "cylinder radius")->required();
  out_opt(cyl);
  json_flag(cyl);

  auto* quo = app.add_subcommand("quotient", "build the permutation quotient at radius r");
  source_opt(quo);
  quo->add_option("--gens", c.gens_path, "generator set JSON")->required();
  quo->add_option("--radius,-r", c.radius, "radius r")->required();
  out_opt(quo);

  auto* cer = app.add_subcommand("certify", "certify a local embedding of the radius-n ball");
  cer->add_option("--quotient", c.quotient_path, "quotient JSON")->required();
  cer->add_option("--ball", c.ball, "ball radius n")->required();
  cer->add_option("--source", c.source_path, "source descriptor JSON")->required();
  cer->add_option("--gens", c.gens_path, "generator set JSON")->required();
  out_opt(cer);

  auto* dc = app.add_subcommand("dcyl", "greedy disjoint cylinder family");
  source_opt(dc);
  dc->add_option("-m", c.m, "cylinder radius")->required();
  out_opt(dc);

  auto* lb = app.add_subcommand("lower-bound", "Alt(5) block lower bounds");
  source_opt(lb);
  lb->add_option("--gens", c.gens_path, "generator set JSON")->required();
  lb->add_option("--m-list", c.m_list, "cylinder radii")->delimiter(',')->required();
  out_opt(lb);
  json_flag(lb);

  auto* gr = app.add_subcommand("growth", "quotient degree upper bounds");
  source_opt(gr);
  gr->add_option("--gens", c.gens_path, "generator set JSON")->required();
  gr->add_option("--radii", c.radii, "quotient radii r")->delimiter(',')->required();
  out_opt(gr);
  json_flag(gr);

  auto* jlp = app.add_subcommand("jlp", "JLP word families");
  jlp->require_subcommand(1);
  auto* jb = jlp->add_subcommand("build", "build levels and write manifests");
  jb->add_option("--r", c.jlp_r, "exponent r > 1")->required();
  jb->add_option("--x", c.jlp_x, "base collection size")->required();
  jb->add_option("--toy-cap", c.toy_cap, "cap on collection sizes (toy mode)");
  jb->add_option("--levels", c.levels, "top level J")->required();
  jb->add_option("--seed", c.seed, "RNG seed");
  jb->add_option("--out", c.out, "output directory")->required();
  auto* jv = jlp->add_subcommand("verify", "recheck a built directory");
  jv->add_option("--dir", c.dir, "directory written by jlp build")->required();
  jv->add_option("--scan-budget", c.scan_budget, "largest word scanned for recurrence");
  json_flag(jv);

  auto* pl = app.add_subcommand("plot", "gnuplot data and a JSON bundle");
  pl->add_option("--upper", c.upper_path, "quotient log-order table JSON");
  pl->add_option("--lower", c.lower_path, "lower-bound table JSON");
  pl->add_option("--out", c.out, "output directory")->required();

  auto finish = [&](int code) {
    rep.exit_code = code;
    err << (c.json ? rep.to_json().dump(2) + "\n" : rep.to_text());
    return code;
  };

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::Success&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    rep.error = e.what();
    return finish(2);
  }

  try {
    c.budget.window = detail::env_size("LEFGROWTH_WINDOW_BUDGET", c.budget.window);
    c.budget.ball = detail::env_size("LEFGROWTH_BALL_BUDGET", c.budget.ball);
    if (window_budget) c.budget.window = window_budget;
    if (ball_budget) c.budget.ball = ball_budget;

    for (auto* sub : app.get_subcommands()) {
      c.verb = sub->get_name();
      if (c.verb == "jlp") c.verb += " " + sub->get_subcommands().front()->get_name();
    }
    detail::Stopwatch total(rep, "total");
    if (c.verb == "complexity") verbs::language_table(c, rep, out, Meaning::complexity);
    else if (c.verb == "recurrence") verbs::language_table(c, rep, out, Meaning::recurrence);
    else if (c.verb == "entropy") verbs::language_table(c, rep, out, Meaning::entropy_estimate);
    else if (c.verb == "cylinders") verbs::cylinders_verb(c, rep, out);
    else if (c.verb == "quotient") verbs::quotient_verb(c, rep, out);
    else if (c.verb == "certify") verbs::certify_verb(c, rep, out);
    else if (c.verb == "dcyl") verbs::dcyl_verb(c, rep, out);
    else if (c.verb == "lower-bound") verbs::lower_bound_verb(c, rep, out);
    else if (c.verb == "growth") verbs::growth_verb(c, rep, out);
    else if (c.verb == "jlp build") verbs::jlp_build_verb(c, rep, out);
    else if (c.verb == "jlp verify") verbs::jlp_verify_verb(c, rep, out);
    else if (c.verb == "plot") verbs::plot_verb(c, rep, out);
    else throw PreconditionError("unknown verb '" + c.verb + "'");
  } catch (const Error& e) {
    rep.error = e.what();
    return finish(exit_code(e.kind()));
  } catch (const std::filesystem::filesystem_error& e) {
    rep.error = e.what();
    return finish(2);
  } catch (const nlohmann::json::exception& e) {
    rep.error = e.what();
    return finish(2);
  }
  return finish(0);
}

}  // namespace lefg::cli
