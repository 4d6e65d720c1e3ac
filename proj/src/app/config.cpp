#include "satin/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

namespace satin::app {

namespace {

using json = nlohmann::json;

// Resolves a key path to a 1-based line by scanning for each quoted key in turn.
class LineFinder {
 public:
  explicit LineFinder(const std::string& text) : text_(text) {}

  int line_of(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    for (const auto& key : path) {
      const std::size_t hit = text_.find("\"" + key + "\"", pos);
      if (hit == std::string::npos) break;
      pos = hit;
    }
    return line_at(pos);
  }

  int line_at(std::size_t byte) const {
    byte = std::min(byte, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
  }

 private:
  const std::string& text_;
};

struct Ctx {
  const LineFinder& lines;
  std::vector<std::string> path;

  Ctx child(const std::string& key) const {
    Ctx c{lines, path};
    c.path.push_back(key);
    return c;
  }
  std::string where() const {
    std::string s;
    for (const auto& p : path) s += (s.empty() ? "" : ".") + p;
    return s.empty() ? "<root>" : s;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const int line = lines.line_of(path);
    throw ConfigError("line " + std::to_string(line) + ": " + where() + ": " + msg, line);
  }
};

void reject_unknown(const json& obj, const Ctx& ctx, const std::set<std::string>& allowed) {
  if (!obj.is_object()) ctx.fail("expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) ctx.child(key).fail("unknown key");
  }
}

double as_number(const json& v, const Ctx& ctx) {
  if (!v.is_number()) ctx.fail("expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) ctx.fail("expected a finite number");
  return d;
}

int as_int(const json& v, const Ctx& ctx) {
  if (!v.is_number_integer()) ctx.fail("expected an integer");
  const auto i = v.get<long long>();
  if (i < -2147483647LL || i > 2147483647LL) ctx.fail("integer out of range");
  return static_cast<int>(i);
}

std::string as_string(const json& v, const Ctx& ctx) {
  if (!v.is_string()) ctx.fail("expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const Ctx& ctx) {
  if (!v.is_boolean()) ctx.fail("expected true or false");
  return v.get<bool>();
}

template <class Enum>
Enum as_enum(const json& v, const Ctx& ctx, const std::map<std::string, Enum>& table) {
  const std::string s = as_string(v, ctx);
  const auto it = table.find(s);
  if (it == table.end()) {
    std::string opts;
    for (const auto& [k, _] : table) opts += (opts.empty() ? "" : ", ") + k;
    ctx.fail("'" + s + "' is not one of: " + opts);
  }
  return it->second;
}

// Either an explicit array or {"start", "stop", "count"} with inclusive ends.
std::vector<double> as_number_list(const json& v, const Ctx& ctx) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], ctx));
  } else if (v.is_object()) {
    reject_unknown(v, ctx, {"start", "stop", "count"});
    for (const char* key : {"start", "stop", "count"}) {
      if (!v.contains(key)) ctx.child(key).fail("missing key");
    }
    const double start = as_number(v["start"], ctx.child("start"));
    const double stop = as_number(v["stop"], ctx.child("stop"));
    const int count = as_int(v["count"], ctx.child("count"));
    if (count < 1) ctx.child("count").fail("must be >= 1");
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  } else {
    ctx.fail("expected an array or a {start, stop, count} range");
  }
  if (out.empty()) ctx.fail("list is empty");
  return out;
}

std::vector<int> as_int_list(const json& v, const Ctx& ctx) {
  if (!v.is_array() || v.empty()) ctx.fail("expected a non-empty array of integers");
  std::vector<int> out;
  for (const auto& x : v) out.push_back(as_int(x, ctx));
  return out;
}

Axis as_axis(const json& v, const Ctx& ctx) {
  return as_enum<Axis>(v, ctx, {{"x", Axis::x}, {"y", Axis::y}, {"z", Axis::z}});
}

ProtocolSequence as_sequence(const json& v, const Ctx& ctx) {
  if (!v.is_array() || v.empty()) ctx.fail("expected a non-empty array of steps");
  ProtocolSequence seq;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& s = v[i];
    const Ctx sc = ctx;
    if (!s.is_object() || !s.contains("op")) sc.fail("step " + std::to_string(i) + " needs an \"op\"");
    const std::string op = as_string(s["op"], sc.child("op"));
    auto need = [&](const char* key) -> const json& {
      if (!s.contains(key)) sc.fail("step " + std::to_string(i) + " (" + op + ") needs \"" + key + "\"");
      return s[key];
    };
    if (op == "rotate") {
      reject_unknown(s, sc, {"op", "axis", "angle"});
      seq.steps.push_back(step::Rotate{as_axis(need("axis"), sc.child("axis")), as_number(need("angle"), sc.child("angle"))});
    } else if (op == "twist") {
      reject_unknown(s, sc, {"op", "q"});
      seq.steps.push_back(step::Twist{as_number(need("q"), sc.child("q"))});
    } else if (op == "imprint") {
      reject_unknown(s, sc, {"op", "phi"});
      seq.steps.push_back(step::ImprintPhase{as_number(need("phi"), sc.child("phi"))});
    } else if (op == "lightshift") {
      reject_unknown(s, sc, {"op", "q"});
      seq.steps.push_back(step::LightShift{as_number(need("q"), sc.child("q"))});
    } else if (op == "echo") {
      reject_unknown(s, sc, {"op"});
      seq.steps.push_back(step::EchoPi{});
    } else if (op == "measure") {
      reject_unknown(s, sc, {"op", "axis"});
      seq.steps.push_back(step::Measure{as_axis(need("axis"), sc.child("axis"))});
    } else {
      sc.child("op").fail("unknown step '" + op + "'");
    }
  }
  try {
    validate(seq);
  } catch (const std::invalid_argument& e) {
    ctx.fail(e.what());
  }
  return seq;
}

const std::map<std::string, Mode>& mode_table() {
  static const std::map<std::string, Mode> table{
      {"simulate", Mode::simulate}, {"sweep-q", Mode::sweep_q}, {"sweep-untwist", Mode::sweep_untwist},
      {"sweep-n", Mode::sweep_n},   {"amplify", Mode::amplify}, {"ramsey", Mode::ramsey},
      {"wigner", Mode::wigner},     {"allan", Mode::allan},     {"optimize", Mode::optimize}};
  return table;
}

void parse_cavity(const json& v, const Ctx& ctx, ExperimentConfig& cfg) {
  reject_unknown(v, ctx, {"eta", "kappa", "gamma", "finesse", "x_a", "x_c", "n_tr_tot"});
  auto num = [&](const char* key, double& dst) {
    if (v.contains(key)) dst = as_number(v[key], ctx.child(key));
  };
  num("eta", cfg.cavity.eta);
  num("kappa", cfg.cavity.kappa);
  num("gamma", cfg.cavity.gamma);
  num("finesse", cfg.cavity.finesse);
  num("x_a", cfg.cavity.x_a);
  num("x_c", cfg.cavity.x_c);
  num("n_tr_tot", cfg.cavity.n_tr_tot);
  for (const char* key : {"eta", "kappa", "gamma", "finesse"}) {
    if (v.contains(key) && !(v[key].get<double>() > 0.0)) ctx.child(key).fail("must be positive");
  }
  if (v.contains("n_tr_tot") && cfg.cavity.n_tr_tot < 0.0) ctx.child("n_tr_tot").fail("must be >= 0");
}

void parse_search(const json& v, const Ctx& ctx, ExperimentConfig& cfg) {
  reject_unknown(v, ctx, {"grid_points", "x_min", "x_max"});
  if (v.contains("grid_points")) cfg.search.grid_points = as_int(v["grid_points"], ctx.child("grid_points"));
  if (v.contains("x_min")) cfg.search.x_min = as_number(v["x_min"], ctx.child("x_min"));
  if (v.contains("x_max")) cfg.search.x_max = as_number(v["x_max"], ctx.child("x_max"));
  if (cfg.search.grid_points < 4) ctx.child("grid_points").fail("must be >= 4");
  if (!(cfg.search.x_min > 0.0) || !(cfg.search.x_max > cfg.search.x_min)) ctx.fail("need 0 < x_min < x_max");
}

void parse_noise(const json& v, const Ctx& ctx, ExperimentConfig& cfg) {
  reject_unknown(v, ctx, {"model", "sigma_meas_sq", "sigma_d_sq", "i_plus", "i_minus", "contrast_sc"});
  if (v.contains("model")) {
    cfg.noise_model = as_enum<NoiseModel>(v["model"], ctx.child("model"),
                                          {{"none", NoiseModel::none}, {"budget", NoiseModel::budget},
                                           {"cavity", NoiseModel::cavity}});
  }
  auto nonneg = [&](const char* key, double& dst) {
    if (!v.contains(key)) return;
    dst = as_number(v[key], ctx.child(key));
    if (dst < 0.0) ctx.child(key).fail("must be >= 0");
  };
  nonneg("sigma_meas_sq", cfg.noise.sigma_meas_sq);
  nonneg("sigma_d_sq", cfg.noise.sigma_d_sq);
  nonneg("i_plus", cfg.noise.i_plus);
  nonneg("i_minus", cfg.noise.i_minus);
  if (v.contains("contrast_sc")) {
    cfg.noise.contrast_sc = as_number(v["contrast_sc"], ctx.child("contrast_sc"));
    if (!(cfg.noise.contrast_sc > 0.0) || cfg.noise.contrast_sc > 1.0) ctx.child("contrast_sc").fail("must be in (0, 1]");
  }
  cfg.search.sigma_meas_sq = cfg.noise.sigma_meas_sq;
}

void parse_protocol(const json& v, const Ctx& ctx, ExperimentConfig& cfg) {
  reject_unknown(v, ctx,
                 {"n_atoms", "n_list", "q_list", "q", "q_plus", "q_minus_list", "phi_list", "shots", "resamples",
                  "sequence", "source", "ac_signal", "n_polar", "n_azimuth", "rotate_phi", "grid_format",
                  "sample_period"});
  if (v.contains("n_atoms")) {
    cfg.n_atoms = as_int(v["n_atoms"], ctx.child("n_atoms"));
    if (cfg.n_atoms < 1) ctx.child("n_atoms").fail("must be >= 1");
  }
  if (v.contains("n_list")) {
    cfg.n_list = as_int_list(v["n_list"], ctx.child("n_list"));
    for (int n : cfg.n_list) {
      if (n < 10) ctx.child("n_list").fail("atom numbers must be >= 10");
    }
  }
  if (v.contains("q_list")) cfg.q_list = as_number_list(v["q_list"], ctx.child("q_list"));
  if (v.contains("q")) cfg.q = as_number(v["q"], ctx.child("q"));
  if (v.contains("q_plus")) cfg.q_plus = as_number(v["q_plus"], ctx.child("q_plus"));
  if (v.contains("q_minus_list")) cfg.q_minus_list = as_number_list(v["q_minus_list"], ctx.child("q_minus_list"));
  if (v.contains("phi_list")) cfg.phi_list = as_number_list(v["phi_list"], ctx.child("phi_list"));
  if (v.contains("shots")) {
    cfg.shots = as_int(v["shots"], ctx.child("shots"));
    if (cfg.shots < 0) ctx.child("shots").fail("must be >= 0");
  }
  if (v.contains("resamples")) {
    cfg.resamples = as_int(v["resamples"], ctx.child("resamples"));
    if (cfg.resamples < 2) ctx.child("resamples").fail("must be >= 2");
  }
  if (v.contains("sequence")) cfg.sequence = as_sequence(v["sequence"], ctx.child("sequence"));
  if (v.contains("source")) {
    cfg.source = as_string(v["source"], ctx.child("source"));
    if (cfg.source != "ideal" && cfg.source != "cavity" && cfg.source != "both") {
      ctx.child("source").fail("must be ideal, cavity or both");
    }
  }
  if (v.contains("ac_signal")) cfg.ac_signal = as_bool(v["ac_signal"], ctx.child("ac_signal"));
  if (v.contains("n_polar")) cfg.n_polar = as_int(v["n_polar"], ctx.child("n_polar"));
  if (v.contains("n_azimuth")) cfg.n_azimuth = as_int(v["n_azimuth"], ctx.child("n_azimuth"));
  if (cfg.n_polar < 8) ctx.child("n_polar").fail("must be >= 8");
  if (cfg.n_azimuth < 8) ctx.child("n_azimuth").fail("must be >= 8");
  if (v.contains("rotate_phi")) cfg.rotate_phi = as_number(v["rotate_phi"], ctx.child("rotate_phi"));
  if (v.contains("grid_format")) {
    cfg.grid_format = as_string(v["grid_format"], ctx.child("grid_format"));
    if (cfg.grid_format != "csv" && cfg.grid_format != "binary") ctx.child("grid_format").fail("must be csv or binary");
  }
  if (v.contains("sample_period")) {
    cfg.sample_period = as_number(v["sample_period"], ctx.child("sample_period"));
    if (!(cfg.sample_period > 0.0)) ctx.child("sample_period").fail("must be positive");
  }
}

void parse_output(const json& v, const Ctx& ctx, ExperimentConfig& cfg) {
  reject_unknown(v, ctx, {"dir", "name", "format"});
  if (v.contains("dir")) cfg.out_dir = as_string(v["dir"], ctx.child("dir"));
  if (v.contains("name")) {
    cfg.name = as_string(v["name"], ctx.child("name"));
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
      ctx.child("name").fail("must be a plain file stem");
    }
  }
  if (v.contains("format")) {
    cfg.format = as_enum<Format>(v["format"], ctx.child("format"), {{"csv", Format::csv}, {"json", Format::json}});
  }
}

void require_fields(const ExperimentConfig& cfg, const Ctx& root) {
  const Ctx p = root.child("protocol");
  auto need = [&](bool ok, const char* what) {
    if (!ok) p.fail(std::string("mode '") + mode_name(cfg.mode) + "' requires " + what);
  };
  switch (cfg.mode) {
    case Mode::simulate: need(!cfg.sequence.steps.empty(), "\"sequence\""); break;
    case Mode::sweep_q: need(!cfg.q_list.empty(), "\"q_list\""); break;
    case Mode::sweep_untwist:
      need(cfg.q_plus.has_value(), "\"q_plus\"");
      need(!cfg.q_minus_list.empty(), "\"q_minus_list\"");
      break;
    case Mode::sweep_n: need(!cfg.n_list.empty(), "\"n_list\""); break;
    case Mode::amplify:
      need(!cfg.q_list.empty(), "\"q_list\"");
      need(!cfg.phi_list.empty(), "\"phi_list\"");
      break;
    case Mode::ramsey: need(!cfg.phi_list.empty(), "\"phi_list\""); break;
    case Mode::wigner: need(cfg.q.has_value(), "\"q\""); break;
    case Mode::allan: need(cfg.shots >= 4, "\"shots\" >= 4"); break;
    case Mode::optimize: need(!cfg.q_list.empty(), "\"q_list\""); break;
  }
  if (cfg.shots > 0 && !cfg.seed) root.fail("\"seed\" is required when shots > 0");
  if (cfg.mode == Mode::optimize || cfg.mode == Mode::sweep_q) {
    for (double q : cfg.q_list) {
      if (cfg.mode == Mode::optimize && q == 0.0) p.child("q_list").fail("twist targets must be nonzero");
    }
  }
}

}  // namespace

std::string mode_name(Mode mode) {
  for (const auto& [name, m] : mode_table()) {
    if (m == mode) return name;
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
  const LineFinder lines(text);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = lines.line_at(e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("line " + std::to_string(line) + ": malformed JSON: " + e.what(), line);
  }
  const Ctx root{lines, {}};
  reject_unknown(doc, root, {"schema_version", "mode", "seed", "cavity", "detuning_search", "noise", "protocol", "output"});

  if (!doc.contains("schema_version")) root.fail("missing \"schema_version\"");
  const int version = as_int(doc["schema_version"], root.child("schema_version"));
  if (version != kSchemaVersion) {
    root.child("schema_version").fail("unsupported version " + std::to_string(version) + ", expected " +
                                      std::to_string(kSchemaVersion));
  }
  if (!doc.contains("mode")) root.fail("missing \"mode\"");

  ExperimentConfig cfg;
  cfg.mode = as_enum<Mode>(doc["mode"], root.child("mode"), mode_table());
  cfg.name = mode_name(cfg.mode);
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) root.child("seed").fail("expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (seed_override) cfg.seed = seed_override;
  if (doc.contains("cavity")) parse_cavity(doc["cavity"], root.child("cavity"), cfg);
  if (doc.contains("noise")) parse_noise(doc["noise"], root.child("noise"), cfg);
  if (doc.contains("detuning_search")) parse_search(doc["detuning_search"], root.child("detuning_search"), cfg);
  if (doc.contains("protocol")) parse_protocol(doc["protocol"], root.child("protocol"), cfg);
  if (doc.contains("output")) parse_output(doc["output"], root.child("output"), cfg);
  cfg.cavity.n_atoms = cfg.n_atoms;
  require_fields(cfg, root);
  return cfg;
}

}  // namespace satin::app
