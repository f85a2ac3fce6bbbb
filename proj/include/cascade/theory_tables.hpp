#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/config.hpp"
#include "cascade/format.hpp"
#include "cascade/theory.hpp"

namespace cascade {

/// key=value parameters of a theory command. Every supplied key must be
/// consumed; finish() reports the rest.
class TheoryParams {
 public:
  explicit TheoryParams(const std::vector<std::string>& pairs) {
    for (const auto& p : pairs) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("parameter '" + p + "' is not key=value");
      const auto key = p.substr(0, eq);
      if (!values_.emplace(key, p.substr(eq + 1)).second) throw UsageError("duplicate parameter '" + key + "'");
    }
  }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse(key, it->second);
  }

  std::optional<double> maybe(const std::string& key) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return parse(key, it->second);
  }

  /// Comma-separated numbers; the text of each item is kept for headers.
  std::vector<std::pair<std::string, double>> list(const std::string& key, const std::string& fallback) {
    std::vector<std::pair<std::string, double>> out;
    const auto s = text(key, fallback);
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto comma = s.find(',', start);
      const auto item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!item.empty()) out.emplace_back(item, parse(key, item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : values_) {
      if (!used_.contains(k)) throw UsageError("unknown parameter '" + k + "'");
    }
  }

 private:
  static double parse(const std::string& key, const std::string& text) {
    try {
      return detail::parse_config_number(text);
    } catch (const std::invalid_argument& e) {
      throw UsageError("parameter " + key + ": " + e.what());
    }
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

/// zeta_min, zeta_min + step, ... up to zeta_max; empty when max < min.
inline std::vector<double> zeta_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw UsageError("zeta_step must be positive");
  std::vector<double> out;
  if (!(hi >= lo)) return out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

/// phi_p or phi_tilde_p curves.
///   header: zeta,phi(p1),phi(p2),...   (phi_tilde(...) for the tilde form)
/// Parameters: p (list, default 1/6,1/9,1/12), zeta_min (17.5), zeta_max (30),
/// zeta_step (0.5), tilde (0 or 1).
inline void write_phi_table(std::ostream& os, TheoryParams& params) {
  const bool tilde = params.number("tilde", 0.0) != 0.0;
  const auto ps = params.list("p", tilde ? "1/9,1/12,1/24" : "1/6,1/9,1/12");
  const auto zetas =
      zeta_grid(params.number("zeta_min", 17.5), params.number("zeta_max", 30.0), params.number("zeta_step", 0.5));
  params.finish();
  const char* name = tilde ? "phi_tilde" : "phi";
  os << "zeta";
  for (const auto& [label, p] : ps) {
    if (!(p >= 0.0)) throw UsageError("p must be non-negative");
    os << ',' << name << '(' << label << ')';
  }
  os << '\n';
  for (const double z : zetas) {
    os << format_double(z);
    for (const auto& [label, p] : ps) os << ',' << format_optional(tilde ? phi_tilde(p, z) : phi(p, z));
    os << '\n';
  }
}

/// Schmidt thresholds.
///   header: r,G,zeta,exponent,threshold,gamma,side_condition,phi_index,threshold_3d
/// Parameters: r (list, default 4/3,3/2,5/3), G (list, 1e6), zeta (list, 10).
inline void write_threshold_table(std::ostream& os, TheoryParams& params) {
  const auto rs = params.list("r", "4/3,3/2,5/3");
  const auto gs = params.list("G", "1e6");
  const auto zs = params.list("zeta", "10");
  params.finish();
  os << "r,G,zeta,exponent,threshold,gamma,side_condition,phi_index,threshold_3d\n";
  for (const auto& [rl, r] : rs) {
    for (const auto& [gl, G] : gs) {
      for (const auto& [zl, z] : zs) {
        os << format_double(r) << ',' << format_double(G) << ',' << format_double(z) << ',';
        try {
          const auto t = bigpr_condition_2d(r, G, z);
          os << format_double(t.exponent) << ',' << format_double(t.threshold) << ',' << format_double(t.gamma) << ','
             << (t.side_condition ? "true" : "false") << ',' << format_double(phi_index(r)) << ','
             << format_double(bigpr_condition_3d(r, G));
        } catch (const std::invalid_argument&) {
          for (int k = 0; k < 6; ++k) os << (k ? "," : "") << kUndefined;
        }
        os << '\n';
      }
    }
  }
}

/// Grashof windows for kappa_eta/kappa0 and kappa_eps/kappa0.
///   header: G,zeta,keta_lower,keta_upper,keta_sharp_lower,keta_sharp_upper,
///           keps_lower,keps_sharp_lower,keps_sharp_upper,keps_sharp_valid
/// Only keta_upper is a plain inequality; the rest hold up to constants.
inline void write_bounds_table(std::ostream& os, TheoryParams& params) {
  const auto gs = params.list("G", "1e2,1e4,1e6,1e8");
  const auto zs = params.list("zeta", "1,10");
  params.finish();
  os << "G,zeta,keta_lower,keta_upper,keta_sharp_lower,keta_sharp_upper,keps_lower,keps_sharp_lower,"
        "keps_sharp_upper,keps_sharp_valid\n";
  for (const auto& [gl, G] : gs) {
    for (const auto& [zl, z] : zs) {
      os << format_double(G) << ',' << format_double(z) << ',';
      try {
        const auto k = keta_bounds(G, z);
        const auto e = keps_bounds(G, z);
        os << format_double(k.lower.value) << ',' << format_double(k.upper.value) << ','
           << format_double(k.sharp_lower.value) << ',' << format_double(k.sharp_upper.value) << ','
           << format_double(e.lower.value) << ',' << format_double(e.sharp_lower.value) << ','
           << format_double(e.sharp_upper.value) << ',' << (e.sharp_valid ? "true" : "false");
      } catch (const std::invalid_argument&) {
        for (int i = 0; i < 8; ++i) os << (i ? "," : "") << kUndefined;
      }
      os << '\n';
    }
  }
}

namespace detail {

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

/// Theorem estimate of kappa_theta^2 as JSON. Parameter `branch` selects
/// 2d_large_sc, 2d_moderate, 2d_log_corrected, 3d or 3d_generalized; `c`
/// is the unknown constant multiplying the estimate (default 1).
inline nlohmann::ordered_json theory_estimate(TheoryParams& params) {
  using nlohmann::ordered_json;
  const auto branch = params.text("branch", "2d_large_sc");
  const double c = params.number("c", 1.0);
  ordered_json inputs;
  TheoryResult r;
  std::optional<ordered_json> extra;
  if (branch == "2d_large_sc" || branch == "2d_moderate") {
    Inputs2d in;
    in.kappa_eta = params.number("kappa_eta", 0.0);
    in.schmidt = params.number("schmidt", branch == "2d_moderate" ? 1.0 : 100.0);
    in.kappa_g_hi = params.number("kappa_g_hi", 0.0);
    in.kappa_f_lo = params.number("kappa_f_lo", 0.0);
    in.kappa_f_hi = params.number("kappa_f_hi", 0.0);
    inputs = {{"kappa_eta", in.kappa_eta}, {"schmidt", in.schmidt},     {"kappa_g_hi", in.kappa_g_hi},
              {"kappa_f_lo", in.kappa_f_lo}, {"kappa_f_hi", in.kappa_f_hi}, {"kappa_beta", in.kappa_beta()}};
    r = branch == "2d_large_sc" ? ktheta_2d_large_sc(in) : ktheta_2d_moderate(in);
  } else if (branch == "2d_log_corrected") {
    const double keta = params.number("kappa_eta", 0.0);
    const double kf = params.number("kappa_f_hi", 0.0);
    const auto a = params.maybe("a");
    inputs = {{"kappa_eta", keta}, {"kappa_f_hi", kf}, {"a", detail::optional_json(a)}};
    r = ktheta_2d_log_corrected(keta, kf, a);
  } else if (branch == "3d" || branch == "3d_generalized") {
    Inputs3d in;
    in.kappa_eps = params.number("kappa_eps", 0.0);
    in.prandtl = params.number("prandtl", 100.0);
    in.kappa_g_hi = params.number("kappa_g_hi", 0.0);
    in.kappa0 = params.number("kappa0", 1.0);
    inputs = {{"kappa_eps", in.kappa_eps},
              {"prandtl", in.prandtl},
              {"kappa_g_hi", in.kappa_g_hi},
              {"kappa0", in.kappa0},
              {"kappa_beta_prime", in.kappa_beta_prime()}};
    if (branch == "3d") {
      r = ktheta_3d(in);
    } else {
      const double p = params.number("p", 5.0 / 3.0);
      try {
        const auto g = generalized_3d(p, in);
        r = g.estimate;
        extra = ordered_json{{"p", g.p}, {"q", g.q}, {"q_prime", g.q_prime}};
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  } else {
    throw UsageError("unknown estimate branch '" + branch + "'");
  }
  params.finish();

  ordered_json j;
  j["branch"] = r.branch.empty() ? branch : r.branch;
  j["inputs"] = inputs;
  if (extra) j["slopes"] = *extra;
  j["a"] = detail::optional_json(r.a);
  j["b"] = detail::optional_json(r.b);
  j["b_prime"] = detail::optional_json(r.b_prime);
  j["ktheta_sq"] = detail::optional_json(r.ktheta_sq);
  j["kappa_theta"] = detail::optional_json(r.ktheta_sq ? std::optional<double>(std::sqrt(*r.ktheta_sq)) : std::nullopt);
  j["constant"] = c;
  j["ktheta_sq_scaled"] =
      detail::optional_json(r.ktheta_sq ? std::optional<double>(c * *r.ktheta_sq) : std::nullopt);
  j["reversed_injection"] = r.reversed_injection;
  j["violations"] = r.violations;
  j["ok"] = r.ok();
  return j;
}

}  // namespace cascade
