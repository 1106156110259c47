#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "tailbounds/bounds.hpp"
#include "tailbounds/simulate.hpp"

namespace tailbounds {

// Machine formats use 17 significant digits (lossless for double);
// human output uses 7.
inline std::string fmt_double(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

namespace detail {

struct JsonWriter {
  std::string out;
  bool first = true;
  void open() { out += '{'; first = true; }
  void close() { out += '}'; }
  void key(const char* k) {
    if (!first) out += ',';
    first = false;
    out += '"';
    out += k;
    out += "\":";
  }
  void field(const char* k, double v) {
    key(k);
    out += fmt_double(v);
  }
  void field(const char* k, const std::string& v) {
    key(k);
    out += '"';
    out += v;
    out += '"';
  }
  void field(const char* k, bool v) {
    key(k);
    out += v ? "true" : "false";
  }
  void field(const char* k, std::uint64_t v) {
    key(k);
    out += std::to_string(v);
  }
};

}  // namespace detail

inline std::string render_report_json(const BoundReport& r) {
  detail::JsonWriter w;
  w.open();
  w.field("n", static_cast<std::uint64_t>(r.query.n));
  w.field("x", r.query.x);
  w.field("t", r.query.t);
  w.field("sigma2_eff", r.aggregation.sigma2_eff);
  w.field("gamma_eff", r.aggregation.gamma_eff);
  w.field("kappa_eff", r.aggregation.kappa_eff);
  w.field("hoeffding", r.hoeffding);
  w.field("chernoff_check", r.chernoff_check);
  w.field("g2", r.g2);
  w.field("g2_oracle_check", r.g2_oracle_check);
  w.field("poisson_closed", r.poisson_closed);
  w.field("poisson_g2", r.poisson_g2);
  w.field("tail_reference", r.tail_reference);
  w.field("tightness", r.tightness);
  w.field("vacuous", r.flags.vacuous);
  w.field("typo_fallback", r.flags.typo_fallback);
  w.field("oracle_mismatch", r.flags.oracle_mismatch);
  w.field("zero_tail", r.flags.zero_tail);
  w.close();
  return w.out;
}

inline std::string render_report_human(const BoundReport& r) {
  std::string s;
  auto line = [&](const char* k, double v) {
    s += k;
    s += ": ";
    s += fmt_double(v, 7);
    s += '\n';
  };
  s += "bound report (n=" + std::to_string(r.query.n) + ", x=" + fmt_double(r.query.x, 7) + ")\n";
  line("  sigma2_eff", r.aggregation.sigma2_eff);
  line("  g2", r.g2);
  line("  g2_oracle_check", r.g2_oracle_check);
  line("  hoeffding", r.hoeffding);
  line("  chernoff_check", r.chernoff_check);
  line("  poisson_closed", r.poisson_closed);
  line("  poisson_g2", r.poisson_g2);
  line("  tail_reference", r.tail_reference);
  line("  tightness", r.tightness);
  if (r.flags.vacuous) s += "  flags: vacuous\n";
  return s;
}

inline std::string render_verdict_json(const VerifyRecord& v) {
  detail::JsonWriter w;
  w.open();
  w.field("x", v.x);
  w.field("estimate", v.estimate);
  w.field("stderr", v.stderr_est);
  w.field("pass", v.pass);
  w.key("margins");
  w.out += '[';
  bool first = true;
  for (const auto& m : v.margins) {
    if (!first) w.out += ',';
    first = false;
    detail::JsonWriter mw;
    mw.open();
    mw.field("bound", std::string(m.name));
    mw.field("value", m.bound);
    mw.field("margin", m.margin);
    mw.field("pass", m.pass);
    mw.close();
    w.out += mw.out;
  }
  w.out += ']';
  w.close();
  return w.out;
}

inline constexpr const char* kTableHeader =
    "x,tail_step,tail_interp,g2,hoeffding,poisson_closed,poisson_g2,tightness";

struct TableRow {
  double x, tail_step, tail_interp, g2, hoeffding, poisson_closed, poisson_g2, tightness;
};

inline std::string render_table_csv(const std::vector<TableRow>& rows) {
  std::string s = kTableHeader;
  s += '\n';
  for (const auto& r : rows) {
    s += fmt_double(r.x) + ',' + fmt_double(r.tail_step) + ',' + fmt_double(r.tail_interp) +
         ',' + fmt_double(r.g2) + ',' + fmt_double(r.hoeffding) + ',' +
         fmt_double(r.poisson_closed) + ',' + fmt_double(r.poisson_g2) + ',' +
         fmt_double(r.tightness) + '\n';
  }
  return s;
}

}  // namespace tailbounds
