#pragma once

// Run configuration for the command-line front end: flat key=value files,
// scenario presets and key overrides. Precedence is preset, then file, then
// explicit overrides.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "specsqueeze/detection.hpp"
#include "specsqueeze/error.hpp"
#include "specsqueeze/optomech.hpp"
#include "specsqueeze/spectral.hpp"

namespace specsqueeze::cli {

enum class ModelKind { Optomech, Lorentzian };
enum class SweepAxis { Omega, MuRatio };

struct ToySpectrum {
  double width = 0.1;
  double n = 1.0;
  cdouble m{0.5, 0.0};
};

struct RunConfig {
  std::string preset;
  ModelKind model = ModelKind::Optomech;
  optomech::OptomechanicalParams params;
  ToySpectrum toy;
  detection::Strategy strategy = detection::SingleHomodyne{0};
  optomech::GridSpec grid;
  SweepAxis axis = SweepAxis::Omega;
  double omega = 0.0;  // fixed frequency of a μ₂/μ₁ sweep
  double mu_ratio_min = 0.0;
  double mu_ratio_max = 3.0;
  int mu_points = 301;
  std::string out;
  bool allow_unstable = false;
};

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "preset", "model", "units", "omega_m_hz", "temperature_k",
      "kappa1", "kappa2", "gamma", "delta", "g", "n_t",
      "strategy", "field", "mu1", "mu2", "theta_c", "detuning",
      "omega_min", "omega_max", "points", "insets", "inset_points", "inset_halfwidth",
      "inset_innermost", "sweep", "omega", "mu_ratio_min", "mu_ratio_max", "mu_points",
      "toy_width", "toy_n", "toy_m_re", "toy_m_im", "out", "allow_unstable"};
  return keys;
}

inline const std::set<std::string>& optomech_keys() {
  static const std::set<std::string> keys{"kappa1", "kappa2", "gamma", "delta",
                                          "g", "n_t", "temperature_k"};
  return keys;
}

inline const std::set<std::string>& toy_keys() {
  static const std::set<std::string> keys{"toy_width", "toy_n", "toy_m_re", "toy_m_im"};
  return keys;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "' expects a number, got '" + v + "'");
  }
}

inline int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "' expects an integer, got '" + v + "'");
  }
  return static_cast<int>(x);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw Error(ErrorKind::ConfigError, "key '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace detail

/// Reads a flat key=value file; '#' and ';' start comments, section headers
/// are not allowed.
inline KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::ConfigError, path + ": " + e.message() + " (line " +
                                            std::to_string(e.line()) + ")");
  }
  KeyValues kv;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      throw Error(ErrorKind::ConfigError, path + ": sections are not supported ([" + key + "])");
    }
    std::string value = detail::trim(node.data());
    const auto hash = value.find('#');
    if (hash != std::string::npos) value = detail::trim(value.substr(0, hash));
    kv[detail::lower(detail::trim(key))] = value;
  }
  return kv;
}

/// Parses "key=value" override strings.
inline KeyValues parse_overrides(const std::vector<std::string>& items) {
  KeyValues kv;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::ConfigError, "override '" + item + "' is not of the form key=value");
    }
    kv[detail::lower(detail::trim(item.substr(0, eq)))] = detail::trim(item.substr(eq + 1));
  }
  return kv;
}

inline std::vector<std::string> preset_names() { return {"fig4a", "fig4b", "fig4c", "fig5"}; }

/// Figure scenarios with κ₁+κ₂ = 0.1ω_m, δ = 0, g = 0.5ω_m, γ = 1e-5ω_m,
/// n_T = 13091. Collective modes use θ_c = 0 and μ₂ = μ₁ except for fig5,
/// which sweeps μ₂/μ₁ at ω = 0.
inline RunConfig scenario_preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  auto& p = c.params;
  p.delta = 0.0;
  p.g = 0.5;
  p.gamma = 1e-5;
  p.omega_m = 1.0;
  p.n_T = 13091.0;
  auto split = [&p](double ratio) {
    p.kappa1 = 0.1 / (1.0 + ratio);
    p.kappa2 = 0.1 - p.kappa1;
  };
  c.strategy = detection::SingleHomodyne{0};
  if (name == "fig4a") {
    split(0.0);
  } else if (name == "fig4b") {
    split(0.3);
  } else if (name == "fig4c") {
    p.kappa1 = p.kappa2 = 0.05;
    c.strategy = detection::TwoModeHomodyne{1.0, 1.0, 0.0};
  } else if (name == "fig5") {
    split(0.3);
    c.strategy = detection::TwoModeHomodyne{1.0, 1.0, 0.0};
    c.axis = SweepAxis::MuRatio;
    c.omega = 0.0;
  } else {
    throw Error(ErrorKind::UnknownPreset, "unknown preset '" + name + "' (expected fig4a, fig4b, fig4c or fig5)");
  }
  return c;
}

/// Applies preset, then `file`, then `overrides`. Frequencies and rates are in
/// units of ω_m unless units=si, in which case they are angular frequencies in
/// s⁻¹ and omega_m_hz gives ω_m in the same unit.
inline RunConfig build_config(const KeyValues& file, const KeyValues& overrides) {
  KeyValues kv = file;
  for (const auto& [k, v] : overrides) kv[k] = v;
  for (const auto& [k, v] : kv) {
    if (!detail::known_keys().count(k)) throw Error(ErrorKind::ConfigError, "unknown key '" + k + "'");
  }
  auto has = [&kv](const std::string& k) { return kv.count(k) > 0; };
  auto num = [&kv](const std::string& k) { return detail::to_double(k, kv.at(k)); };

  RunConfig c;
  if (has("preset")) c = scenario_preset(detail::lower(kv.at("preset")));

  bool any_optomech = false, any_toy = false;
  for (const auto& [k, v] : kv) {
    any_optomech = any_optomech || detail::optomech_keys().count(k) > 0;
    any_toy = any_toy || detail::toy_keys().count(k) > 0;
  }
  if (has("model")) {
    const std::string m = detail::lower(kv.at("model"));
    if (m == "optomech") {
      c.model = ModelKind::Optomech;
    } else if (m == "lorentzian") {
      c.model = ModelKind::Lorentzian;
    } else {
      throw Error(ErrorKind::ConfigError, "model must be optomech or lorentzian");
    }
  } else if (any_toy) {
    c.model = ModelKind::Lorentzian;
  }
  if (c.model == ModelKind::Optomech && any_toy) {
    throw Error(ErrorKind::ConfigError, "toy_* keys given for the optomechanical model");
  }
  if (c.model == ModelKind::Lorentzian && (any_optomech || has("preset"))) {
    throw Error(ErrorKind::ConfigError, "exactly one model may be configured");
  }

  double scale = 1.0;
  const std::string units = has("units") ? detail::lower(kv.at("units")) : "omega_m";
  if (units == "si") {
    if (!has("omega_m_hz")) throw Error(ErrorKind::ConfigError, "units=si requires omega_m_hz");
    scale = num("omega_m_hz");
    if (!(scale > 0.0)) throw Error(ErrorKind::ConfigError, "omega_m_hz must be positive");
  } else if (units != "omega_m") {
    throw Error(ErrorKind::ConfigError, "units must be omega_m or si");
  }
  auto freq = [&](const std::string& k) { return num(k) / scale; };

  auto& p = c.params;
  if (has("kappa1")) p.kappa1 = freq("kappa1");
  if (has("kappa2")) p.kappa2 = freq("kappa2");
  if (has("gamma")) p.gamma = freq("gamma");
  if (has("delta")) p.delta = freq("delta");
  if (has("g")) p.g = freq("g");
  if (has("n_t")) {
    p.n_T = num("n_t");
  } else if (has("temperature_k")) {
    if (!has("omega_m_hz")) throw Error(ErrorKind::ConfigError, "temperature_k requires omega_m_hz");
    p.n_T = optomech::bose_occupation(num("omega_m_hz"), num("temperature_k"));
  }

  if (has("toy_width")) c.toy.width = freq("toy_width");
  if (has("toy_n")) c.toy.n = num("toy_n");
  if (has("toy_m_re") || has("toy_m_im")) {
    c.toy.m = {has("toy_m_re") ? num("toy_m_re") : 0.0, has("toy_m_im") ? num("toy_m_im") : 0.0};
  }

  if (has("strategy")) {
    const std::string s = detail::lower(kv.at("strategy"));
    if (s == "i") {
      c.strategy = detection::SingleHomodyne{0};
    } else if (s == "ii") {
      c.strategy = detection::TwoModeHomodyne{1.0, 1.0, 0.0};
    } else if (s == "iii") {
      c.strategy = detection::CrossField{};
    } else if (s == "heterodyne") {
      c.strategy = detection::Heterodyne{0.0};
    } else {
      throw Error(ErrorKind::ConfigError, "strategy must be I, II, III or heterodyne");
    }
  }
  if (auto* h = std::get_if<detection::SingleHomodyne>(&c.strategy)) {
    if (has("field")) {
      const int f = detail::to_int("field", kv.at("field"));
      if (f != 1 && f != 2) throw Error(ErrorKind::ConfigError, "field must be 1 or 2");
      h->field = f - 1;
    }
  }
  if (auto* t = std::get_if<detection::TwoModeHomodyne>(&c.strategy)) {
    if (has("mu1")) t->mu1 = num("mu1");
    if (has("mu2")) t->mu2 = num("mu2");
    if (has("theta_c")) t->theta_c = num("theta_c");
    if (!(t->mu1 * t->mu1 + t->mu2 * t->mu2 > 0.0)) {
      throw Error(ErrorKind::ConfigError, "mu1 and mu2 must not both vanish");
    }
  }
  if (auto* h = std::get_if<detection::Heterodyne>(&c.strategy)) {
    if (!has("detuning")) throw Error(ErrorKind::ConfigError, "heterodyne strategy requires detuning");
    h->detuning = freq("detuning");
  }

  auto& gs = c.grid;
  if (has("omega_min")) gs.omega_min = freq("omega_min");
  if (has("omega_max")) gs.omega_max = freq("omega_max");
  if (has("points")) gs.points = detail::to_int("points", kv.at("points"));
  if (has("insets")) gs.insets = detail::to_bool("insets", kv.at("insets"));
  if (has("inset_points")) gs.inset_points = detail::to_int("inset_points", kv.at("inset_points"));
  if (has("inset_halfwidth")) gs.inset_halfwidth = num("inset_halfwidth");
  if (has("inset_innermost")) gs.inset_innermost = num("inset_innermost");
  if (!(gs.omega_min < gs.omega_max)) throw Error(ErrorKind::ConfigError, "omega_min must be below omega_max");
  if (gs.points < 2) throw Error(ErrorKind::ConfigError, "points must be at least 2");
  if (gs.insets && !(gs.inset_innermost > 0.0 && gs.inset_innermost < gs.inset_halfwidth)) {
    throw Error(ErrorKind::ConfigError, "need 0 < inset_innermost < inset_halfwidth");
  }

  if (has("sweep")) {
    const std::string s = detail::lower(kv.at("sweep"));
    if (s == "omega") {
      c.axis = SweepAxis::Omega;
    } else if (s == "mu_ratio") {
      c.axis = SweepAxis::MuRatio;
    } else {
      throw Error(ErrorKind::ConfigError, "sweep must be omega or mu_ratio");
    }
  }
  if (has("omega")) c.omega = freq("omega");
  if (has("mu_ratio_min")) c.mu_ratio_min = num("mu_ratio_min");
  if (has("mu_ratio_max")) c.mu_ratio_max = num("mu_ratio_max");
  if (has("mu_points")) c.mu_points = detail::to_int("mu_points", kv.at("mu_points"));
  if (c.axis == SweepAxis::MuRatio) {
    if (!std::holds_alternative<detection::TwoModeHomodyne>(c.strategy)) {
      throw Error(ErrorKind::ConfigError, "a mu_ratio sweep needs strategy II");
    }
    if (!(c.mu_ratio_min >= 0.0 && c.mu_ratio_min < c.mu_ratio_max) || c.mu_points < 2) {
      throw Error(ErrorKind::ConfigError, "need 0 <= mu_ratio_min < mu_ratio_max and mu_points >= 2");
    }
  }

  if (has("out")) c.out = kv.at("out");
  if (has("allow_unstable")) c.allow_unstable = detail::to_bool("allow_unstable", kv.at("allow_unstable"));

  if (c.model == ModelKind::Optomech) {
    try {
      p.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, e.what());
    }
  } else {
    if (!(c.toy.width > 0.0)) throw Error(ErrorKind::ConfigError, "toy_width must be positive");
    if (!(c.toy.n >= 0.0) || std::norm(c.toy.m) > c.toy.n * (c.toy.n + 1.0)) {
      throw Error(ErrorKind::ConfigError, "toy spectrum needs n >= 0 and |m|^2 <= n(n+1)");
    }
  }
  return c;
}

inline spectral::PowerSpectrumModel make_model(const RunConfig& c) {
  if (c.model == ModelKind::Lorentzian) return spectral::lorentzian_model(c.toy.width, c.toy.n, c.toy.m);
  return optomech::output_spectrum_model(c.params);
}

}  // namespace specsqueeze::cli
