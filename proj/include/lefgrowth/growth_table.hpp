#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace lefg {

enum class Meaning {
  complexity,
  recurrence,
  entropy_estimate,
  quotient_degree,
  quotient_log_order,
  lower_bound_exponent,
};

inline const char* to_string(Meaning m) {
  switch (m) {
    case Meaning::complexity: return "complexity";
    case Meaning::recurrence: return "recurrence";
    case Meaning::entropy_estimate: return "entropy-estimate";
    case Meaning::quotient_degree: return "quotient-degree";
    case Meaning::quotient_log_order: return "quotient-log-order";
    case Meaning::lower_bound_exponent: return "lower-bound-exponent";
  }
  return "unknown";
}

inline Meaning meaning_from_string(const std::string& s) {
  for (auto m : {Meaning::complexity, Meaning::recurrence, Meaning::entropy_estimate, Meaning::quotient_degree,
                 Meaning::quotient_log_order, Meaning::lower_bound_exponent})
    if (s == to_string(m)) return m;
  throw PreconditionError("unknown table meaning '" + s + "'");
}

/// Integer-valued meanings print without a fractional part.
inline bool is_integral(Meaning m) {
  return m == Meaning::complexity || m == Meaning::recurrence || m == Meaning::quotient_degree;
}

/// Shortest faithful rendering with 12 significant digits.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct GrowthRow {
  std::int64_t n = 0;
  double value = 0;
  bool exact = true;
};

class GrowthTable {
public:
  GrowthTable() = default;
  explicit GrowthTable(Meaning meaning) : meaning_(meaning) {}

  Meaning meaning() const noexcept { return meaning_; }
  const std::vector<GrowthRow>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }

  void add(std::int64_t n, double value, bool exact) {
    if (!rows_.empty() && n <= rows_.back().n)
      throw PreconditionError("growth table rows must have strictly increasing n");
    rows_.push_back({n, value, exact});
  }

  const GrowthRow* find(std::int64_t n) const {
    for (const auto& r : rows_)
      if (r.n == n) return &r;
    return nullptr;
  }

  bool all_exact() const {
    for (const auto& r : rows_)
      if (!r.exact) return false;
    return true;
  }

  std::string format_value(double v) const {
    if (is_integral(meaning_)) return std::to_string(static_cast<std::int64_t>(std::llround(v)));
    return format_real(v);
  }

  std::string to_csv() const {
    std::string out = "n,value,exact\n";
    for (const auto& r : rows_)
      out += std::to_string(r.n) + "," + format_value(r.value) + "," + (r.exact ? "true" : "false") + "\n";
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
      nlohmann::ordered_json row;
      row["n"] = r.n;
      if (is_integral(meaning_))
        row["value"] = static_cast<std::int64_t>(std::llround(r.value));
      else
        row["value"] = std::stod(format_real(r.value));
      row["exact"] = r.exact;
      rows.push_back(row);
    }
    nlohmann::ordered_json out;
    out["meaning"] = to_string(meaning_);
    out["rows"] = rows;
    return out;
  }

  static GrowthTable from_csv(Meaning meaning, const std::string& text) {
    GrowthTable t(meaning);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "n,value,exact") throw PreconditionError("bad growth table header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto c1 = line.find(','), c2 = line.rfind(',');
      if (c1 == std::string::npos || c1 == c2) throw PreconditionError("bad growth table row '" + line + "'");
      std::string flag = line.substr(c2 + 1);
      if (flag != "true" && flag != "false") throw PreconditionError("bad exact flag in '" + line + "'");
      t.add(std::stoll(line.substr(0, c1)), std::stod(line.substr(c1 + 1, c2 - c1 - 1)), flag == "true");
    }
    return t;
  }

  static GrowthTable from_json(const nlohmann::json& j) {
    GrowthTable t(meaning_from_string(j.at("meaning").get<std::string>()));
    for (const auto& r : j.at("rows")) t.add(r.at("n").get<std::int64_t>(), r.at("value").get<double>(), r.at("exact").get<bool>());
    return t;
  }

private:
  Meaning meaning_ = Meaning::complexity;
  std::vector<GrowthRow> rows_;
};

/// Violations of the structural invariants of a stored table (empty when none).
/// complexity: p(n+m) <= p(n) p(m) on stored points; recurrence: nondecreasing.
inline std::vector<std::string> check_invariants(const GrowthTable& t, std::size_t alphabet_size = 0) {
  std::vector<std::string> bad;
  const auto& rows = t.rows();
  if (t.meaning() == Meaning::complexity) {
    for (const auto& a : rows) {
      if (alphabet_size > 0 && std::log(a.value) > static_cast<double>(a.n) * std::log(static_cast<double>(alphabet_size)) + 1e-9)
        bad.push_back("p(" + std::to_string(a.n) + ") exceeds |A|^n");
      for (const auto& b : rows)
        if (const auto* c = t.find(a.n + b.n); c && c->value > a.value * b.value)
          bad.push_back("p(" + std::to_string(c->n) + ") > p(" + std::to_string(a.n) + ") p(" + std::to_string(b.n) + ")");
    }
  }
  if (t.meaning() == Meaning::recurrence) {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].value < rows[i - 1].value) bad.push_back("recurrence decreases at n=" + std::to_string(rows[i].n));
  }
  return bad;
}

}  // namespace lefg
