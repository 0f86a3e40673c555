#include "defosc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace defosc::scenario {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mode",           "omega",          "dim",
      "beta",           "lambda",         "series_tol",
      "deformation.kind", "deformation.tau", "deformation.q",
      "deformation.table", "bath.kind",    "bath.gamma",
      "bath.nbar",      "bath.m_re",      "bath.m_im",
      "bath.d_plus",    "bath.d_minus",   "bath.d_pq",
      "initial_state.kind", "initial_state.n", "initial_state.beta",
      "initial_state.weights", "initial_state.path", "t_end",
      "dt",             "sample_every",   "sweep.base",
      "sweep.parameter", "sweep.values",  "output.path",
      "output.format",
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& field, std::string_view text, bool allow_inf = false) {
  text = trim(text);
  if (allow_inf && (text == "inf" || text == "+inf" || text == "infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(field, "expected a number, got \"" + std::string(text) + "\"");
  }
  if (!std::isfinite(value)) throw ConfigError(field, "value must be finite");
  return value;
}

std::size_t parse_count(const std::string& field, std::string_view text) {
  text = trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(field, "expected a nonnegative integer, got \"" + std::string(text) + "\"");
  }
  return value;
}

std::vector<double> parse_list(const std::string& field, std::string_view text) {
  std::vector<double> values;
  text = trim(text);
  if (text.empty()) return values;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    values.push_back(parse_real(field, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

class Reader {
 public:
  explicit Reader(const FlatConfig& flat) : flat_(flat) {}

  bool has(const std::string& key) const { return flat_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key) const {
    const auto it = flat_.find(key);
    if (it == flat_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> real(const std::string& key, bool allow_inf = false) const {
    const auto t = text(key);
    if (!t) return std::nullopt;
    return parse_real(key, *t, allow_inf);
  }

  double real_or(const std::string& key, double fallback) const { return real(key).value_or(fallback); }

  std::optional<std::vector<double>> list(const std::string& key) const {
    const auto t = text(key);
    if (!t) return std::nullopt;
    return parse_list(key, *t);
  }

  void forbid(const std::string& key, const std::string& why) const {
    if (has(key)) throw ConfigError(key, why);
  }

 private:
  const FlatConfig& flat_;
};

void flatten_json(const nlohmann::json& node, const std::string& prefix, FlatConfig& out) {
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      flatten_json(child, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  auto scalar = [&](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    throw ConfigError(prefix, "unsupported JSON value");
  };
  if (node.is_array()) {
    std::string joined;
    for (std::size_t k = 0; k < node.size(); ++k) {
      if (node[k].is_structured()) throw ConfigError(prefix, "nested arrays are not supported");
      if (k) joined += ',';
      joined += scalar(node[k]);
    }
    out[prefix] = joined;
    return;
  }
  out[prefix] = scalar(node);
}

template <typename Fn>
auto as_config_error(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

Deformation parse_deformation(const Reader& in) {
  const bool has_tau = in.has("deformation.tau");
  const bool has_q = in.has("deformation.q");
  std::string kind = in.text("deformation.kind").value_or(has_tau || has_q ? "q" : "identity");
  if (kind == "q_deformed") kind = "q";

  if (kind == "identity") {
    in.forbid("deformation.tau", "only valid for deformation.kind = q");
    in.forbid("deformation.q", "only valid for deformation.kind = q");
    in.forbid("deformation.table", "only valid for deformation.kind = custom");
    return Deformation::identity();
  }
  if (kind == "q") {
    in.forbid("deformation.table", "only valid for deformation.kind = custom");
    if (has_tau && has_q) throw ConfigError("deformation.q", "give either deformation.tau or deformation.q");
    if (has_q) {
      const double q = *in.real("deformation.q");
      return as_config_error("deformation.q", [&] { return Deformation::from_q(q); });
    }
    if (!has_tau) throw ConfigError("deformation.tau", "required for deformation.kind = q");
    return Deformation::q_deformed(*in.real("deformation.tau"));
  }
  if (kind == "custom") {
    in.forbid("deformation.tau", "only valid for deformation.kind = q");
    in.forbid("deformation.q", "only valid for deformation.kind = q");
    auto table = in.list("deformation.table");
    if (!table || table->empty()) throw ConfigError("deformation.table", "required for deformation.kind = custom");
    return as_config_error("deformation.table", [&] { return Deformation::custom(std::move(*table)); });
  }
  throw ConfigError("deformation.kind", "expected identity, q or custom, got \"" + kind + "\"");
}

std::optional<BathModel> parse_bath(const Reader& in, const ScenarioConfig& cfg, bool needed) {
  const std::string kind = in.text("bath.kind").value_or("thermal");
  const char* thermal_only[] = {"bath.gamma", "bath.nbar", "bath.m_re", "bath.m_im"};
  const char* custom_only[] = {"bath.d_plus", "bath.d_minus", "bath.d_pq"};

  if (kind == "thermal") {
    for (auto key : thermal_only) in.forbid(key, "only valid for bath.kind = squeezed");
    for (auto key : custom_only) in.forbid(key, "only valid for bath.kind = custom");
    if (!cfg.beta) {
      if (needed) throw ConfigError("beta", "required by the thermal bath");
      return std::nullopt;
    }
    return as_config_error("lambda", [&] { return BathModel::thermal(cfg.lambda, *cfg.beta); });
  }
  if (kind == "squeezed") {
    for (auto key : custom_only) in.forbid(key, "only valid for bath.kind = custom");
    in.forbid("lambda", "the squeezed bath sets lambda = bath.gamma");
    const auto gamma = in.real("bath.gamma");
    if (!gamma) throw ConfigError("bath.gamma", "required for bath.kind = squeezed");
    const double nbar = in.real_or("bath.nbar", 0.0);
    const complex m{in.real_or("bath.m_re", 0.0), in.real_or("bath.m_im", 0.0)};
    return as_config_error("bath", [&] { return squeezed_preset(*gamma, nbar, m); });
  }
  if (kind == "custom") {
    for (auto key : thermal_only) in.forbid(key, "only valid for bath.kind = squeezed");
    auto d_plus = in.list("bath.d_plus");
    if (!d_plus || d_plus->empty()) throw ConfigError("bath.d_plus", "required for bath.kind = custom");
    auto d_minus = in.list("bath.d_minus").value_or(std::vector<double>{});
    auto d_pq = in.list("bath.d_pq").value_or(std::vector<double>{});
    return as_config_error("bath", [&] {
      return BathModel::custom(cfg.lambda, std::move(*d_plus), std::move(d_minus), std::move(d_pq));
    });
  }
  throw ConfigError("bath.kind", "expected thermal, squeezed or custom, got \"" + kind + "\"");
}

InitialState parse_initial_state(const Reader& in, const ScenarioConfig& cfg) {
  InitialState state;
  const std::string kind = in.text("initial_state.kind").value_or("fock");
  auto only_for = [&](const char* key, const char* owner) {
    in.forbid(key, std::string("only valid for initial_state.kind = ") + owner);
  };
  if (kind == "fock") {
    state.kind = InitialStateKind::fock;
    if (const auto n = in.text("initial_state.n")) state.n = parse_count("initial_state.n", *n);
    if (state.n >= cfg.mode_params.dim) throw ConfigError("initial_state.n", "level outside the truncated basis");
    only_for("initial_state.beta", "thermal");
    only_for("initial_state.weights", "diagonal");
    only_for("initial_state.path", "file");
  } else if (kind == "thermal") {
    state.kind = InitialStateKind::thermal;
    const auto beta = in.real("initial_state.beta", true);
    if (!beta && !cfg.beta) throw ConfigError("initial_state.beta", "required (or set top-level beta)");
    state.beta = beta ? *beta : *cfg.beta;
    if (!(state.beta > 0.0)) throw ConfigError("initial_state.beta", "must be positive");
    only_for("initial_state.n", "fock");
    only_for("initial_state.weights", "diagonal");
    only_for("initial_state.path", "file");
  } else if (kind == "diagonal") {
    state.kind = InitialStateKind::diagonal;
    auto weights = in.list("initial_state.weights");
    if (!weights) throw ConfigError("initial_state.weights", "required for initial_state.kind = diagonal");
    if (weights->size() != cfg.mode_params.dim) {
      throw ConfigError("initial_state.weights", "needs exactly dim entries");
    }
    state.weights = std::move(*weights);
    only_for("initial_state.n", "fock");
    only_for("initial_state.beta", "thermal");
    only_for("initial_state.path", "file");
  } else if (kind == "file") {
    state.kind = InitialStateKind::file;
    const auto path = in.text("initial_state.path");
    if (!path || path->empty()) throw ConfigError("initial_state.path", "required for initial_state.kind = file");
    state.path = *path;
    only_for("initial_state.n", "fock");
    only_for("initial_state.beta", "thermal");
    only_for("initial_state.weights", "diagonal");
  } else {
    throw ConfigError("initial_state.kind", "expected fock, thermal, diagonal or file, got \"" + kind + "\"");
  }
  return state;
}

std::optional<SweepSpec> parse_sweep(const Reader& in, Mode mode) {
  const bool any = in.has("sweep.base") || in.has("sweep.parameter") || in.has("sweep.values");
  if (mode != Mode::sweep) {
    if (any) throw ConfigError("sweep", "a sweep block needs mode = sweep");
    return std::nullopt;
  }
  SweepSpec sweep;
  const auto base = in.text("sweep.base");
  if (!base) throw ConfigError("sweep.base", "required for mode = sweep");
  sweep.base = parse_mode(*base, "sweep.base");
  if (sweep.base == Mode::sweep) throw ConfigError("sweep.base", "a sweep cannot sweep sweeps");

  const auto parameter = in.text("sweep.parameter");
  if (!parameter) throw ConfigError("sweep.parameter", "required for mode = sweep");
  sweep.parameter = *parameter;
  if (sweep.parameter != "tau" && sweep.parameter != "beta" && sweep.parameter != "lambda" &&
      sweep.parameter != "dim") {
    throw ConfigError("sweep.parameter", "expected tau, beta, lambda or dim");
  }
  auto values = in.list("sweep.values");
  if (!values || values->empty()) throw ConfigError("sweep.values", "needs at least one value");
  if (sweep.parameter == "dim") {
    for (double v : *values) {
      if (v != std::floor(v) || v < 2.0) throw ConfigError("sweep.values", "dim values must be integers >= 2");
    }
  }
  sweep.values = std::move(*values);
  return sweep;
}

}  // namespace

Mode parse_mode(std::string_view text, const std::string& field) {
  text = trim(text);
  if (text == "spectrum") return Mode::spectrum;
  if (text == "evolve") return Mode::evolve;
  if (text == "steady") return Mode::steady;
  if (text == "thermo") return Mode::thermo;
  if (text == "sweep") return Mode::sweep;
  throw ConfigError(field, "unknown mode \"" + std::string(text) + "\"");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::spectrum:
      return "spectrum";
    case Mode::evolve:
      return "evolve";
    case Mode::steady:
      return "steady";
    case Mode::thermo:
      return "thermo";
    case Mode::sweep:
      return "sweep";
  }
  return "?";
}

FlatConfig parse_flat(std::string_view text) {
  FlatConfig flat;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto newline = text.find('\n', start);
    const auto raw = text.substr(start, newline == std::string_view::npos ? std::string_view::npos : newline - start);
    ++line_no;
    const auto line = trim(raw);
    if (!line.empty() && line.front() != '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
      }
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
      if (!flat.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
        throw ConfigError(key, "duplicate key");
      }
    }
    if (newline == std::string_view::npos) break;
    start = newline + 1;
  }
  return flat;
}

FlatConfig parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "JSON config must be an object");
  FlatConfig flat;
  flatten_json(doc, "", flat);
  return flat;
}

FlatConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = path.extension() == ".json" || (first != std::string::npos && text[first] == '{');
  return json ? parse_json(text) : parse_flat(text);
}

ScenarioConfig parse_config(const FlatConfig& flat) {
  for (const auto& [key, value] : flat) {
    if (known_keys().count(key) == 0) throw ConfigError(key, "unknown key");
  }
  const Reader in(flat);
  ScenarioConfig cfg;

  const auto mode = in.text("mode");
  if (!mode) throw ConfigError("mode", "required");
  cfg.mode = parse_mode(*mode);

  cfg.mode_params.omega = in.real_or("omega", 1.0);
  if (!(cfg.mode_params.omega > 0.0)) throw ConfigError("omega", "must be positive");
  if (const auto dim = in.text("dim")) cfg.mode_params.dim = parse_count("dim", *dim);
  if (cfg.mode_params.dim < 2) throw ConfigError("dim", "must be at least 2");

  cfg.beta = in.real("beta", true);
  if (cfg.beta && !(*cfg.beta > 0.0)) throw ConfigError("beta", "must be positive (inf for T = 0)");
  cfg.lambda = in.real_or("lambda", 0.0);
  if (cfg.lambda < 0.0) throw ConfigError("lambda", "must be nonnegative");
  cfg.series_tol = in.real_or("series_tol", kDefaultSeriesTol);
  if (!(cfg.series_tol > 0.0)) throw ConfigError("series_tol", "must be positive");

  cfg.sweep = parse_sweep(in, cfg.mode);
  const Mode effective = cfg.sweep ? cfg.sweep->base : cfg.mode;

  cfg.deformation = parse_deformation(in);
  if (cfg.deformation.kind() == DeformationKind::custom && cfg.deformation.max_level() < cfg.mode_params.dim) {
    throw ConfigError("deformation.table", "needs at least dim entries f(1)..f(dim)");
  }

  const bool bath_needed = !cfg.sweep && (effective == Mode::evolve || effective == Mode::steady);
  cfg.bath = parse_bath(in, cfg, bath_needed);
  cfg.initial_state = parse_initial_state(in, cfg);

  cfg.t_end = in.real("t_end");
  if (cfg.t_end && *cfg.t_end < 0.0) throw ConfigError("t_end", "must be nonnegative");
  if (!cfg.sweep && effective == Mode::evolve && !cfg.t_end) throw ConfigError("t_end", "required for evolve");
  cfg.dt = in.real("dt");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (const auto every = in.text("sample_every")) cfg.sample_every = parse_count("sample_every", *every);
  if (cfg.sample_every == 0) throw ConfigError("sample_every", "must be at least 1");

  if (!cfg.sweep && effective == Mode::steady && cfg.bath && cfg.bath->kind() != BathKind::custom &&
      !(cfg.bath->lambda() > 0.0)) {
    throw ConfigError(cfg.bath->kind() == BathKind::squeezed ? "bath.gamma" : "lambda",
                      "steady needs a positive dissipation rate");
  }

  if (!cfg.sweep && effective == Mode::thermo) {
    if (cfg.deformation.kind() == DeformationKind::custom) {
      throw ConfigError("deformation.kind", "thermo needs the identity or q deformation");
    }
    if (!cfg.beta || std::isinf(*cfg.beta)) throw ConfigError("beta", "thermo needs a finite beta");
    if (*cfg.beta < kMinClosedFormBeta) throw ConfigError("beta", "thermo needs beta >= 1e-6");
  }

  if (const auto path = in.text("output.path")) cfg.output_path = *path;
  const std::string format = in.text("output.format").value_or("csv");
  if (format == "csv") {
    cfg.format = OutputFormat::csv;
  } else if (format == "json") {
    cfg.format = OutputFormat::json;
  } else {
    throw ConfigError("output.format", "expected csv or json");
  }
  return cfg;
}

FlatConfig with_sweep_value(const FlatConfig& flat, const std::string& parameter, double value) {
  FlatConfig out = flat;
  out.erase("sweep.base");
  out.erase("sweep.parameter");
  out.erase("sweep.values");
  if (const auto it = flat.find("sweep.base"); it != flat.end()) out["mode"] = it->second;
  if (parameter == "tau") {
    const auto kind = flat.find("deformation.kind");
    if (kind == flat.end() || kind->second == "identity") out["deformation.kind"] = "q";
    out.erase("deformation.q");
    out["deformation.tau"] = format_number(value);
  } else if (parameter == "beta") {
    out["beta"] = format_number(value);
  } else if (parameter == "lambda") {
    out["lambda"] = format_number(value);
  } else if (parameter == "dim") {
    out["dim"] = format_number(value);
  } else {
    throw ConfigError("sweep.parameter", "expected tau, beta, lambda or dim");
  }
  return out;
}

}  // namespace defosc::scenario
