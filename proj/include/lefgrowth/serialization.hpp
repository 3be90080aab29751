#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "jlp.hpp"
#include "lower_bound.hpp"
#include "quotient.hpp"
#include "subshift.hpp"
#include "tfg.hpp"
#include "word_source.hpp"

namespace lefg {

using ojson = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << text;
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(what + ": " + e.what());
  }
}

template <class T>
T json_get(const nlohmann::json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw PreconditionError(what + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(what + ": field '" + key + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Sources

struct LoadedSource {
  std::shared_ptr<const WordSource> source;
  std::shared_ptr<const JlpFamily> jlp;  // set for jlp descriptors
  ojson descriptor;                      // canonical form
};

inline JlpParams jlp_params_from_json(const nlohmann::json& j) {
  JlpParams p;
  p.r = json_get<double>(j, "r", "jlp descriptor");
  p.x = json_get<std::int64_t>(j, "x", "jlp descriptor");
  p.levels = json_get<int>(j, "levels", "jlp descriptor");
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("toy_cap") && !j.at("toy_cap").is_null()) p.toy_cap = j.at("toy_cap").get<std::int64_t>();
  return p;
}

inline ojson jlp_params_to_json(const JlpParams& p, std::int64_t M0 = 1) {
  ojson j;
  j["kind"] = "jlp";
  j["alphabet"] = "ab";
  j["r"] = p.r;
  j["x"] = p.x;
  j["levels"] = p.levels;
  j["seed"] = p.seed;
  if (p.toy_cap) j["toy_cap"] = *p.toy_cap;
  j["M0"] = M0;
  return j;
}

inline LoadedSource load_source(const nlohmann::json& j, Budget budget = {}) {
  const auto kind = json_get<std::string>(j, "kind", "source descriptor");
  LoadedSource out;
  if (kind == "substitution") {
    Alphabet a(json_get<std::string>(j, "alphabet", "source descriptor"));
    std::map<char, Word> rules;
    const auto rule_obj = json_get<nlohmann::json>(j, "rules", "source descriptor");
    for (auto& [k, v] : rule_obj.items()) {
      if (k.size() != 1) throw PreconditionError("rule keys must be single symbols");
      rules[k[0]] = v.get<std::string>();
    }
    auto seed = j.contains("seed") ? j.at("seed").get<std::string>() : std::string(1, a.symbol(0));
    if (seed.size() != 1) throw PreconditionError("substitution seed must be one symbol");
    out.source = substitution_source(a, rules, seed[0], budget);
    out.descriptor["kind"] = kind;
    out.descriptor["alphabet"] = a.symbols();
    ojson r;
    for (char c : a.symbols()) r[std::string(1, c)] = rules[c];
    out.descriptor["rules"] = r;
    out.descriptor["seed"] = seed;
  } else if (kind == "periodic") {
    Alphabet a(json_get<std::string>(j, "alphabet", "source descriptor"));
    auto pattern = json_get<std::string>(j, "pattern", "source descriptor");
    out.source = std::make_shared<PeriodicSource>(a, pattern);
    out.descriptor = {{"kind", kind}, {"alphabet", a.symbols()}, {"pattern", pattern}};
  } else if (kind == "jlp") {
    auto p = jlp_params_from_json(j);
    std::int64_t M0 = j.contains("M0") ? j.at("M0").get<std::int64_t>() : 1;
    auto fam = std::make_shared<const JlpFamily>(build_family(p));
    out.jlp = fam;
    out.source = jlp_word_source(fam, M0);
    out.descriptor = jlp_params_to_json(p, M0);
  } else if (kind == "limit") {
    Alphabet a(json_get<std::string>(j, "alphabet", "source descriptor"));
    std::vector<std::pair<Word, std::int64_t>> levels;
    for (const auto& l : json_get<nlohmann::json>(j, "levels", "source descriptor"))
      levels.emplace_back(l.at(0).get<std::string>(), l.size() > 1 ? l.at(1).get<std::int64_t>() : 0);
    auto M0 = json_get<std::int64_t>(j, "M0", "source descriptor");
    out.source = limit_word(a, levels, M0);
    out.descriptor = {{"kind", kind}, {"alphabet", a.symbols()}, {"levels", j.at("levels")}, {"M0", M0}};
  } else {
    throw PreconditionError("unknown source kind '" + kind + "'");
  }
  return out;
}

inline LoadedSource load_source_file(const std::string& path, Budget budget = {}) {
  return load_source(parse_json(read_file(path), path), budget);
}

// ---------------------------------------------------------------------------
// Elements and generator sets

inline ojson element_to_json(const TfgElement& g) {
  ojson entries = ojson::array();
  const auto& lv = g.subshift().level(g.precision());
  for (std::size_t i = 0; i < g.table().size(); ++i) entries.push_back({{"word", lv.words[i]}, {"shift", g.table()[i]}});
  return {{"precision", g.precision()}, {"entries", entries}};
}

inline TfgElement element_from_json(const Subshift& ss, const nlohmann::json& j) {
  int p = json_get<int>(j, "precision", "element");
  const auto& lv = ss.level(p);
  std::vector<std::int32_t> t(static_cast<std::size_t>(lv.size()), 0);
  std::vector<std::uint8_t> seen(t.size(), 0);
  for (const auto& e : json_get<nlohmann::json>(j, "entries", "element")) {
    auto w = json_get<std::string>(e, "word", "element entry");
    auto id = lv.id(w);
    if (id < 0) throw PreconditionError("'" + w + "' is not a cylinder of X");
    if (seen[static_cast<std::size_t>(id)]) throw PreconditionError("duplicate entry for '" + w + "'");
    seen[static_cast<std::size_t>(id)] = 1;
    t[static_cast<std::size_t>(id)] = json_get<std::int32_t>(e, "shift", "element entry");
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw PreconditionError("element table misses cylinder '" + lv.words[i] + "'");
  return TfgElement::from_table(ss, p, std::move(t));
}

/// Builtin sets: {"builtin": "base", "m_range": [lo, hi]} and
/// {"builtin": "blocks", "m": m, "count": k} (the first k greedy DCyl members at m).
/// Explicit sets: {"generators": [{"name", "element"} | {"name", "construct", "word", "shift"}], "order": [...]}.
inline GeneratorSet load_generators(const Subshift& ss, const nlohmann::json& j) {
  if (j.contains("builtin")) {
    auto kind = j.at("builtin").get<std::string>();
    int C0 = j.contains("C0") ? j.at("C0").get<int>() : compute_C0(ss);
    if (kind == "base") {
      BaseSetOptions opt;
      if (j.contains("m_range")) {
        opt.m_lo = j.at("m_range").at(0).get<int>();
        opt.m_hi = j.at("m_range").at(1).get<int>();
      }
      return base_generating_set(ss, C0, opt);
    }
    if (kind == "blocks") {
      int m = json_get<int>(j, "m", "generator file");
      auto count = json_get<std::size_t>(j, "count", "generator file");
      auto fam = greedy_dcyl(ss, m);
      if (fam.members.size() < count)
        throw PreconditionError("DCyl at m = " + std::to_string(m) + " has only " + std::to_string(fam.members.size()) + " members");
      GeneratorSet s(ss);
      for (std::size_t b = 0; b < count; ++b) {
        const auto& u = fam.members[b];
        s.add(generator_name("f-1", u.word), make_fU(ss, u, -1));
        s.add(generator_name("f0", u.word), make_fU(ss, u, 0));
        s.add(generator_name("f+1", u.word), make_fU(ss, u, 1));
      }
      return s;
    }
    throw PreconditionError("unknown builtin generator set '" + kind + "'");
  }
  std::map<std::string, TfgElement> named;
  for (const auto& g : json_get<nlohmann::json>(j, "generators", "generator file")) {
    auto name = json_get<std::string>(g, "name", "generator");
    if (named.count(name)) throw PreconditionError("duplicate generator name '" + name + "'");
    if (g.contains("element")) {
      named.emplace(name, element_from_json(ss, g.at("element")));
      continue;
    }
    auto c = json_get<std::string>(g, "construct", "generator");
    CenteredWord u(json_get<std::string>(g, "word", "generator"));
    if (c == "fU")
      named.emplace(name, make_fU(ss, u, g.contains("shift") ? g.at("shift").get<int>() : 0));
    else if (c == "hU")
      named.emplace(name, make_hU(ss, u));
    else if (c == "tau")
      named.emplace(name, make_tau(ss, u));
    else
      throw PreconditionError("unknown constructor '" + c + "'");
  }
  std::vector<std::string> order;
  if (j.contains("order"))
    order = j.at("order").get<std::vector<std::string>>();
  else
    for (const auto& g : j.at("generators")) order.push_back(g.at("name").get<std::string>());
  GeneratorSet s(ss);
  for (const auto& n : order) {
    auto it = named.find(n);
    if (it == named.end()) throw PreconditionError("order names unknown generator '" + n + "'");
    s.add(n, it->second);
  }
  if (s.empty()) throw PreconditionError("generator set is empty");
  return s;
}

inline GeneratorSet load_generators_file(const Subshift& ss, const std::string& path) {
  return load_generators(ss, parse_json(read_file(path), path));
}

inline std::string generators_digest(const GeneratorSet& s) {
  std::string text;
  for (std::size_t i = 0; i < s.size(); ++i) text += s.names()[i] + "=" + element_to_json(s[i]).dump() + "\n";
  return hex64(fnv1a64(text));
}

// ---------------------------------------------------------------------------
// Quotients and certificates

inline ojson quotient_to_json(const PermutationQuotient& q) {
  ojson perms = ojson::array();
  for (const auto& p : q.perms) perms.push_back(p);
  return {{"M", q.M}, {"r", q.r}, {"C1", q.C1}, {"names", q.names}, {"perms", perms}, {"source_digest", q.source_digest}};
}

inline PermutationQuotient quotient_from_json(const nlohmann::json& j) {
  PermutationQuotient q;
  q.M = json_get<std::int64_t>(j, "M", "quotient");
  q.r = json_get<int>(j, "r", "quotient");
  q.C1 = json_get<int>(j, "C1", "quotient");
  q.source_digest = json_get<std::string>(j, "source_digest", "quotient");
  q.perms = json_get<std::vector<Perm>>(j, "perms", "quotient");
  if (j.contains("names")) q.names = j.at("names").get<std::vector<std::string>>();
  if (q.names.size() != q.perms.size()) {
    q.names.clear();
    for (std::size_t c = 0; c < q.perms.size(); ++c) q.names.push_back("s" + std::to_string(c));
  }
  return q;
}

inline ojson certificate_to_json(const LocalEmbeddingCertificate& c) {
  return {{"ball_radius", c.ball_radius},       {"ball_size", c.ball_size},
          {"pairs_checked", c.pairs_checked},   {"pairs_examined", c.pairs_examined},
          {"injective", c.injective},           {"multiplicative", c.multiplicative},
          {"collisions", c.collisions},         {"moved_points", c.domain.size()}};
}

inline ojson family_to_json(const DisjointCylinderFamily& f) {
  ojson members = ojson::array();
  for (const auto& u : f.members) members.push_back(u.word);
  return {{"m", f.m}, {"size", f.members.size()}, {"covered", f.covered}, {"members", members}};
}

inline ojson block_to_json(const Alt5Block& b, const GeneratorSet& s) {
  ojson words = ojson::array();
  for (const auto& w : b.words) words.push_back({{"length", w.length()}, {"word", w.to_string(s)}});
  ojson supp = ojson::array();
  for (const auto& c : b.support.cylinders()) supp.push_back(c.word);
  return {{"U", b.U.word}, {"order", b.elements.size()}, {"max_word_length", b.max_word_length},
          {"generator_words", words}, {"support_precision", b.support.precision()}, {"support", supp}};
}

inline ojson report_to_json(const ClauseReport& r) {
  ojson out = ojson::array();
  for (const auto& c : r.clauses) {
    ojson e{{"clause", c.name}, {"status", to_string(c.status)}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    out.push_back(e);
  }
  return out;
}

inline std::string permutations_digest(const JlpLevel& lv) {
  std::string text;
  if (lv.j == 0)
    for (const auto& w : lv.words) text += w + "\n";
  for (const auto& p : lv.perms) {
    for (auto v : p) text += std::to_string(v) + ",";
    text += "\n";
  }
  return hex64(fnv1a64(text));
}

inline ojson level_manifest(const JlpFamily& fam, const JlpLevel& lv) {
  ojson j{{"j", lv.j}, {"N", lv.N}, {"l", lv.l}, {"seed", fam.params().seed}, {"capped", lv.capped},
          {"digest", permutations_digest(lv)}};
  if (lv.j > 0) j["log_formula_size"] = std::stod(format_real(lv.log_formula));
  if (lv.j == 0) j["words"] = lv.words;
  return j;
}

}  // namespace lefg
