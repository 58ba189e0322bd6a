#include "sisde/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace sisde::cli {

namespace {

std::string join_messages(const std::vector<std::string>& messages) {
  std::string out = "invalid config";
  for (const auto& m : messages) out += "\n  " + m;
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Collects typed values and every problem met along the way.
class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& values) : values_(values) {}

  std::vector<std::string> errors;

  void fail(const std::string& key, const std::string& message) {
    failed_.push_back(key);
    errors.push_back(message);
  }

  double real(const std::string& key) {
    const std::string& text = values_.at(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail(key, key + ": expected a finite real, got '" + text + "'");
      return 0.0;
    }
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const std::string& text = values_.at(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(key, key + ": expected a nonnegative integer, got '" + text + "'");
      return 0;
    }
    return v;
  }

  int integer(const std::string& key) {
    const std::string& text = values_.at(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(key, key + ": expected an integer, got '" + text + "'");
      return 0;
    }
    return v;
  }

  bool boolean(const std::string& key) {
    const std::string& text = values_.at(key);
    if (text == "true") return true;
    if (text == "false") return false;
    fail(key, key + ": expected true or false, got '" + text + "'");
    return false;
  }

  template <class E>
  E choice(const std::string& key, std::initializer_list<std::pair<std::string_view, E>> options) {
    const std::string& text = values_.at(key);
    std::string allowed;
    for (const auto& [name, value] : options) {
      if (text == name) return value;
      allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    fail(key, key + ": expected one of " + allowed + ", got '" + text + "'");
    return options.begin()->second;
  }

  std::vector<int> int_list(const std::string& key) {
    const std::string& text = values_.at(key);
    std::vector<int> out;
    std::string_view rest = text;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      int v = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
        fail(key, key + ": expected a comma separated list of integers, got '" + text + "'");
        return {};
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  void require(bool ok, const std::string& key, const std::string& what) {
    if (std::find(failed_.begin(), failed_.end(), key) != failed_.end()) return;
    if (!ok) errors.push_back(key + ": " + what + " (got '" + values_.at(key) + "')");
  }

 private:
  const std::map<std::string, std::string>& values_;
  std::vector<std::string> failed_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : Error(join_messages(messages)), messages_(std::move(messages)) {}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"model.kind", "greenhalgh"},
      {"model.mu", "0.01"},
      {"model.gamma", "0.05"},
      {"model.lambda.family", "constant"},
      {"model.lambda.l0", "0.2"},
      {"model.lambda.l1", "0"},
      {"model.lambda.c", "1"},
      {"model.M", "2"},
      {"model.H", "2"},
      {"model.L", "1"},
      {"custom.a0", "0"},
      {"custom.ay", "0"},
      {"custom.ax", "0"},
      {"custom.alpha0", "0"},
      {"custom.alpha1", "0"},
      {"custom.beta0", "0"},
      {"custom.beta1", "0"},
      {"custom.scale", "1"},
      {"custom.y.kind", "sqrt"},
      {"custom.y.m0", "0"},
      {"custom.y.m1", "0"},
      {"custom.y.sigma0", "0"},
      {"custom.y.sigma1", "0"},
      {"init.x0", "30"},
      {"init.y0", "100"},
      {"sim.T", "1"},
      {"sim.level", "8"},
      {"sim.levels", "6,7,8,9,10"},
      {"sim.paths", "1000"},
      {"sim.seed", "1"},
      {"sim.rho", "0"},
      {"sim.absorb", "true"},
      {"sim.dt", "0.001"},
      {"sim.scheme", "triangular"},
      {"validate.samples", "10000"},
      {"validate.y_min", "1"},
      {"validate.y_max", "200"},
      {"validate.x_min", "0"},
      {"validate.x_max", "200"},
      {"validate.t", "0"},
      {"fp.mode", "master"},
      {"fp.n1", "160"},
      {"fp.n2", "160"},
      {"fp.h", "1"},
      {"fp.dt", "0.001"},
      {"fp.snapshots", "1"},
      {"compare.kind", "n_marginal"},
      {"compare.threshold", "0.05"},
      {"output.dir", "."},
      {"output.trajectories", "10"},
      {"output.bins", "20"},
  };
  return keys;
}

ScenarioConfig parse_config(std::string_view text) {
  std::vector<std::string> errors;
  std::map<std::string, std::pair<std::string, std::size_t>> given;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const auto& keys = config_keys();
    if (std::none_of(keys.begin(), keys.end(), [&](const auto& k) { return k.first == key; })) {
      errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      continue;
    }
    if (const auto it = given.find(key); it != given.end()) {
      errors.push_back("duplicate key '" + key + "' on lines " + std::to_string(it->second.second) +
                       " and " + std::to_string(line_no));
      continue;
    }
    if (value.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
      continue;
    }
    given.emplace(key, std::make_pair(value, line_no));
  }

  ScenarioConfig c;
  for (const auto& [key, def] : config_keys()) {
    const auto it = given.find(key);
    c.values[key] = it == given.end() ? def : it->second.first;
  }

  Reader r(c.values);
  c.kind = r.choice<ModelKind>("model.kind",
                               {{"greenhalgh", ModelKind::greenhalgh}, {"custom", ModelKind::custom}});
  c.greenhalgh.mu = r.real("model.mu");
  r.require(c.greenhalgh.mu > 0.0, "model.mu", "must be > 0");
  c.greenhalgh.gamma = r.real("model.gamma");
  r.require(c.greenhalgh.gamma >= 0.0, "model.gamma", "must be >= 0");
  c.greenhalgh.contact.family = r.choice<ContactFamily>(
      "model.lambda.family", {{"constant", ContactFamily::constant},
                              {"affine", ContactFamily::affine},
                              {"saturating", ContactFamily::saturating}});
  c.greenhalgh.contact.l0 = r.real("model.lambda.l0");
  c.greenhalgh.contact.l1 = r.real("model.lambda.l1");
  c.greenhalgh.contact.c = r.real("model.lambda.c");
  if (c.kind == ModelKind::greenhalgh) {
    r.require(c.greenhalgh.contact.l0 > 0.0, "model.lambda.l0", "must be > 0");
    r.require(c.greenhalgh.contact.l1 >= 0.0, "model.lambda.l1", "must be >= 0");
    if (c.greenhalgh.contact.family == ContactFamily::saturating) {
      r.require(c.greenhalgh.contact.c > 0.0, "model.lambda.c", "must be > 0");
    }
  }
  c.declared.M = r.real("model.M");
  r.require(c.declared.M >= 0.0, "model.M", "must be >= 0");
  c.declared.H = r.real("model.H");
  r.require(c.declared.H >= 0.0, "model.H", "must be >= 0");
  c.declared.L = r.real("model.L");
  r.require(c.declared.L >= 0.0, "model.L", "must be >= 0");

  c.custom.a0 = r.real("custom.a0");
  c.custom.ay = r.real("custom.ay");
  c.custom.ax = r.real("custom.ax");
  c.custom.alpha0 = r.real("custom.alpha0");
  c.custom.alpha1 = r.real("custom.alpha1");
  c.custom.beta0 = r.real("custom.beta0");
  c.custom.beta1 = r.real("custom.beta1");
  c.custom.scale = r.real("custom.scale");
  r.require(c.custom.scale >= 0.0, "custom.scale", "must be >= 0");
  c.custom.driving = r.choice<DrivingKind>(
      "custom.y.kind", {{"sqrt", DrivingKind::square_root}, {"general", DrivingKind::general}});
  c.custom.m0 = r.real("custom.y.m0");
  c.custom.m1 = r.real("custom.y.m1");
  c.custom.sigma0 = r.real("custom.y.sigma0");
  c.custom.sigma1 = r.real("custom.y.sigma1");

  c.x0 = r.real("init.x0");
  c.y0 = r.real("init.y0");
  if (c.kind == ModelKind::greenhalgh || c.custom.driving == DrivingKind::square_root) {
    r.require(c.y0 >= 0.0, "init.y0", "must be >= 0");
  }

  c.sim.horizon = r.real("sim.T");
  r.require(c.sim.horizon > 0.0, "sim.T", "must be > 0");
  c.sim.level = r.integer("sim.level");
  r.require(c.sim.level >= 0 && c.sim.level <= 24, "sim.level", "must be in [0, 24]");
  c.sim.levels = r.int_list("sim.levels");
  {
    bool ok = c.sim.levels.size() >= 2;
    for (std::size_t i = 0; i < c.sim.levels.size(); ++i) {
      ok = ok && c.sim.levels[i] >= 0 && c.sim.levels[i] <= 24 &&
           (i == 0 || c.sim.levels[i] > c.sim.levels[i - 1]);
    }
    if (!c.sim.levels.empty()) {
      r.require(ok, "sim.levels", "needs at least two strictly increasing levels in [0, 24]");
    }
  }
  c.sim.paths = r.unsigned_integer("sim.paths");
  r.require(c.sim.paths >= 1, "sim.paths", "must be >= 1");
  c.sim.seed = r.unsigned_integer("sim.seed");
  c.sim.rho = r.real("sim.rho");
  r.require(c.sim.rho >= -1.0 && c.sim.rho <= 1.0, "sim.rho", "must be in [-1, 1]");
  c.sim.absorb = r.boolean("sim.absorb");
  c.sim.dt = r.real("sim.dt");
  r.require(c.sim.dt > 0.0, "sim.dt", "must be > 0");
  c.sim.scheme = r.choice<Scheme>("sim.scheme",
                                  {{"triangular", Scheme::triangular}, {"full2d", Scheme::full2d}});

  c.validate.samples = r.unsigned_integer("validate.samples");
  r.require(c.validate.samples >= 2, "validate.samples", "must be >= 2");
  c.validate.box.y_min = r.real("validate.y_min");
  c.validate.box.y_max = r.real("validate.y_max");
  r.require(c.validate.box.y_max >= c.validate.box.y_min, "validate.y_max", "must be >= validate.y_min");
  c.validate.box.x_min = r.real("validate.x_min");
  c.validate.box.x_max = r.real("validate.x_max");
  r.require(c.validate.box.x_max >= c.validate.box.x_min, "validate.x_max", "must be >= validate.x_min");
  c.validate.box.t = r.real("validate.t");

  c.fp.mode = r.choice<FpMode>("fp.mode", {{"master", FpMode::master}, {"fokker", FpMode::fokker}});
  c.fp.n1 = r.unsigned_integer("fp.n1");
  r.require(c.fp.n1 >= 1 && c.fp.n1 <= 4096, "fp.n1", "must be in [1, 4096]");
  c.fp.n2 = r.unsigned_integer("fp.n2");
  r.require(c.fp.n2 >= 1 && c.fp.n2 <= 4096, "fp.n2", "must be in [1, 4096]");
  c.fp.h = r.real("fp.h");
  r.require(c.fp.h > 0.0, "fp.h", "must be > 0");
  c.fp.dt = r.real("fp.dt");
  r.require(c.fp.dt > 0.0, "fp.dt", "must be > 0");
  c.fp.snapshots = r.unsigned_integer("fp.snapshots");
  r.require(c.fp.snapshots >= 1, "fp.snapshots", "must be >= 1");

  c.compare.kind = r.choice<CompareKind>(
      "compare.kind",
      {{"n_marginal", CompareKind::n_marginal}, {"master_vs_jump", CompareKind::master_vs_jump}});
  c.compare.threshold = r.real("compare.threshold");
  r.require(c.compare.threshold >= 0.0, "compare.threshold", "must be >= 0");

  c.output.dir = c.values.at("output.dir");
  c.output.trajectories = r.unsigned_integer("output.trajectories");
  c.output.bins = r.unsigned_integer("output.bins");
  r.require(c.output.bins >= 1, "output.bins", "must be >= 1");

  errors.insert(errors.end(), r.errors.begin(), r.errors.end());
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

void override_seed(ScenarioConfig& config, std::uint64_t seed) {
  config.sim.seed = seed;
  config.values["sim.seed"] = std::to_string(seed);
}

std::string manifest_text(const ScenarioConfig& config, std::string_view command) {
  std::string out = "# sisde 0.1.0\n# command: ";
  out += command;
  out += '\n';
  for (const auto& [key, def] : config_keys()) {
    if (key == "output.dir") continue;
    out += key + " = " + config.values.at(key) + "\n";
  }
  return out;
}

}  // namespace sisde::cli
