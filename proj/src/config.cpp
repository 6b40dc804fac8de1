#include "ganssl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace ganssl {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw ConfigError("config parse error at line " + std::to_string(line) + ": " +
                    what);
}

bool looks_like_integer(const std::string& t) {
  if (t.empty()) return false;
  std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i == t.size()) return false;
  for (; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  }
  return true;
}

TomlValue parse_scalar(const std::string& token, std::size_t line) {
  if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
    return token.substr(1, token.size() - 2);
  }
  if (token == "true") return true;
  if (token == "false") return false;
  if (looks_like_integer(token)) {
    return static_cast<std::int64_t>(std::stoll(token));
  }
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty()) {
    parse_fail(line, "cannot parse value '" + token + "'");
  }
  return v;
}

std::vector<std::string> split_array_items(const std::string& body,
                                           std::size_t line) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (char c : body) {
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_string) parse_fail(line, "unterminated string in array");
  const std::string last = trim(cur);
  if (!last.empty()) items.push_back(last);
  return items;
}

TomlValue parse_array(const std::string& body, std::size_t line) {
  const auto items = split_array_items(body, line);
  if (items.empty()) return std::vector<double>{};
  std::vector<TomlValue> scalars;
  scalars.reserve(items.size());
  for (const auto& it : items) scalars.push_back(parse_scalar(it, line));
  if (std::holds_alternative<std::string>(scalars[0])) {
    std::vector<std::string> out;
    for (auto& s : scalars) {
      if (!std::holds_alternative<std::string>(s)) {
        parse_fail(line, "mixed types in array");
      }
      out.push_back(std::get<std::string>(s));
    }
    return out;
  }
  bool any_double = false;
  for (const auto& s : scalars) {
    if (std::holds_alternative<double>(s)) any_double = true;
    if (std::holds_alternative<std::string>(s) || std::holds_alternative<bool>(s)) {
      parse_fail(line, "mixed types in array");
    }
  }
  if (any_double) {
    std::vector<double> out;
    for (const auto& s : scalars) {
      out.push_back(std::holds_alternative<double>(s)
                        ? std::get<double>(s)
                        : static_cast<double>(std::get<std::int64_t>(s)));
    }
    return out;
  }
  std::vector<std::int64_t> out;
  for (const auto& s : scalars) out.push_back(std::get<std::int64_t>(s));
  return out;
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

std::map<std::string, TomlValue> parse_toml_subset(const std::string& text) {
  std::map<std::string, TomlValue> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(line_no, "malformed section header");
      const std::string section = trim(line.substr(1, line.size() - 2));
      if (section != "study") {
        parse_fail(line_no, "unknown section [" + section + "]; only [study] is recognized");
      }
      continue;  // [study] keys are top-level keys
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_fail(line_no, "empty key");
    if (out.contains(key)) parse_fail(line_no, "duplicate key '" + key + "'");
    if (value.empty()) parse_fail(line_no, "missing value for '" + key + "'");
    if (value.front() == '[') {
      if (value.back() != ']') parse_fail(line_no, "unterminated array");
      out.emplace(key, parse_array(value.substr(1, value.size() - 2), line_no));
    } else {
      out.emplace(key, parse_scalar(value, line_no));
    }
  }
  return out;
}

namespace {

[[noreturn]] void key_fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double as_double(const std::string& key, const TomlValue& v) {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<std::int64_t>(v)) {
    return static_cast<double>(std::get<std::int64_t>(v));
  }
  key_fail(key, "expected a number");
}

std::int64_t as_int(const std::string& key, const TomlValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  key_fail(key, "expected an integer");
}

std::size_t as_size(const std::string& key, const TomlValue& v) {
  const auto i = as_int(key, v);
  if (i < 0) key_fail(key, "must be non-negative");
  return static_cast<std::size_t>(i);
}

std::string as_string(const std::string& key, const TomlValue& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  key_fail(key, "expected a string");
}

bool as_bool(const std::string& key, const TomlValue& v) {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  key_fail(key, "expected true or false");
}

std::vector<double> as_double_list(const std::string& key, const TomlValue& v) {
  if (std::holds_alternative<std::vector<double>>(v)) {
    return std::get<std::vector<double>>(v);
  }
  if (std::holds_alternative<std::vector<std::int64_t>>(v)) {
    std::vector<double> out;
    for (auto i : std::get<std::vector<std::int64_t>>(v)) {
      out.push_back(static_cast<double>(i));
    }
    return out;
  }
  key_fail(key, "expected an array of numbers");
}

std::vector<int> as_int_list(const std::string& key, const TomlValue& v) {
  if (!std::holds_alternative<std::vector<std::int64_t>>(v)) {
    key_fail(key, "expected an array of integers");
  }
  std::vector<int> out;
  for (auto i : std::get<std::vector<std::int64_t>>(v)) {
    out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<std::string> as_string_list(const std::string& key, const TomlValue& v) {
  if (std::holds_alternative<std::vector<std::string>>(v)) {
    return std::get<std::vector<std::string>>(v);
  }
  key_fail(key, "expected an array of strings");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

OptimizerKind ExperimentConfig::optimizer_kind() const {
  if (optimizer == "adam") return OptimizerKind::adam;
  if (optimizer == "sgd") return OptimizerKind::sgd;
  throw ConfigError("config key 'optimizer': must be \"adam\" or \"sgd\"");
}

ManifoldSpec ExperimentConfig::manifold() const {
  std::vector<Disc> discs;
  for (std::size_t i = 0; i < disc_x.size(); ++i) {
    discs.push_back(Disc{{disc_x[i], disc_y[i]}, disc_r[i], disc_class[i],
                         disc_label[i]});
  }
  return ManifoldSpec::create(std::move(discs), class_count);
}

std::filesystem::path ExperimentConfig::resolved_out_dir() const {
  if (!out_dir.empty()) return out_dir;
  if (const char* env = std::getenv("GANSSL_LAB_OUT"); env && *env) return env;
  return "runs";
}

void ExperimentConfig::validate() const {
  for (double e : eps) {
    if (!(e >= 0.0 && e < 1.0)) {
      throw ConfigError("config key 'eps': eps must lie in [0,1)");
    }
  }
  if (study == StudyKind::case1d && eps.empty()) {
    throw ConfigError("config key 'eps': case1d needs at least one eps value");
  }
  if (!(grid_lo < grid_hi)) throw ConfigError("config: grid_lo must be < grid_hi");
  if (grid_cells < 2) throw ConfigError("config: grid_cells must be >= 2");
  if (!(data_sigma > 0.0)) throw ConfigError("config: data_sigma must be positive");
  if (!(kde_bandwidth > 0.0)) {
    throw ConfigError("config: kde_bandwidth must be positive");
  }
  if (kde_bandwidth_rule != "fixed" && kde_bandwidth_rule != "silverman") {
    throw ConfigError("config: kde_bandwidth_rule must be \"fixed\" or \"silverman\"");
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("config: learning_rate must be positive");
  }
  if (batch == 0) throw ConfigError("config: batch must be >= 1");
  if (steps == 0) throw ConfigError("config: steps must be >= 1");
  if (rounds == 0) throw ConfigError("config: rounds must be >= 1");
  if (eval_samples == 0) throw ConfigError("config: eval_samples must be >= 1");
  (void)optimizer_kind();
  if (gen_dims.size() < 2 || gen_dims.front() != 1 || gen_dims.back() != 1) {
    throw ConfigError("config: gen_dims must map a 1D latent to a 1D sample");
  }
  const std::size_t nd = disc_x.size();
  if (disc_y.size() != nd || disc_r.size() != nd || disc_class.size() != nd ||
      disc_label.size() != nd) {
    throw ConfigError("config: disc_x/disc_y/disc_r/disc_class/disc_label "
                      "must have equal lengths");
  }
  if (study == StudyKind::case2d) {
    if (nd == 0) throw ConfigError("config: case2d needs at least one disc");
    (void)manifold();  // validates disjointness and classes
    if (feature_dims.size() < 2 || feature_dims.front() != 2) {
      throw ConfigError("config: feature_dims must start at 2 (2D input)");
    }
    if (gen_dims_2d.size() < 2 || gen_dims_2d.front() != latent_dim ||
        gen_dims_2d.back() != 2) {
      throw ConfigError("config: gen_dims_2d must map latent_dim to 2D output");
    }
    if (n_disc_steps < 1 || n_gen_steps < 0) {
      throw ConfigError("config: n_disc_steps >= 1 and n_gen_steps >= 0 required");
    }
    if (scenario == ScenarioKind::coverage_violated) {
      if (uncovered.empty()) {
        throw ConfigError("config: a violated scenario must name at least one "
                          "uncovered subdomain");
      }
      for (const auto& u : uncovered) {
        if (std::find(disc_label.begin(), disc_label.end(), u) ==
            disc_label.end()) {
          throw ConfigError("config: uncovered subdomain '" + u +
                            "' is not a disc label");
        }
      }
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  const auto kv = parse_toml_subset(text);
  ExperimentConfig c;
  if (!kv.contains("study")) {
    throw ConfigError("config: missing required key 'study'");
  }
  for (const auto& [key, value] : kv) {
    if (key == "study") {
      const auto s = as_string(key, value);
      if (s == "case1d") c.study = StudyKind::case1d;
      else if (s == "case2d") c.study = StudyKind::case2d;
      else if (s == "verify") c.study = StudyKind::verify;
      else key_fail(key, "must be \"case1d\", \"case2d\" or \"verify\"");
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(as_int(key, value));
    } else if (key == "out_dir") {
      c.out_dir = as_string(key, value);
    } else if (key == "grid_lo") {
      c.grid_lo = as_double(key, value);
    } else if (key == "grid_hi") {
      c.grid_hi = as_double(key, value);
    } else if (key == "grid_cells") {
      c.grid_cells = as_size(key, value);
    } else if (key == "eps") {
      c.eps = as_double_list(key, value);
    } else if (key == "data_mu") {
      c.data_mu = as_double(key, value);
    } else if (key == "data_sigma") {
      c.data_sigma = as_double(key, value);
    } else if (key == "gen_dims") {
      c.gen_dims = as_int_list(key, value);
    } else if (key == "kde_bandwidth") {
      c.kde_bandwidth = as_double(key, value);
    } else if (key == "kde_bandwidth_rule") {
      c.kde_bandwidth_rule = as_string(key, value);
    } else if (key == "eval_samples") {
      c.eval_samples = as_size(key, value);
    } else if (key == "steps") {
      c.steps = as_size(key, value);
    } else if (key == "scenario") {
      const auto s = as_string(key, value);
      if (s == "satisfied") c.scenario = ScenarioKind::coverage_satisfied;
      else if (s == "violated") c.scenario = ScenarioKind::coverage_violated;
      else key_fail(key, "must be \"satisfied\" or \"violated\"");
    } else if (key == "uncovered") {
      c.uncovered = as_string_list(key, value);
    } else if (key == "disc_x") {
      c.disc_x = as_double_list(key, value);
    } else if (key == "disc_y") {
      c.disc_y = as_double_list(key, value);
    } else if (key == "disc_r") {
      c.disc_r = as_double_list(key, value);
    } else if (key == "disc_class") {
      c.disc_class = as_int_list(key, value);
    } else if (key == "disc_label") {
      c.disc_label = as_string_list(key, value);
    } else if (key == "class_count") {
      c.class_count = static_cast<int>(as_int(key, value));
    } else if (key == "feature_dims") {
      c.feature_dims = as_int_list(key, value);
    } else if (key == "gen_dims_2d") {
      c.gen_dims_2d = as_int_list(key, value);
    } else if (key == "latent_dim") {
      c.latent_dim = static_cast<int>(as_int(key, value));
    } else if (key == "labeled_per_subdomain") {
      c.labeled_per_subdomain = as_size(key, value);
    } else if (key == "unlabeled_total") {
      c.unlabeled_total = as_size(key, value);
    } else if (key == "rounds") {
      c.rounds = as_size(key, value);
    } else if (key == "n_disc_steps") {
      c.n_disc_steps = static_cast<int>(as_int(key, value));
    } else if (key == "n_gen_steps") {
      c.n_gen_steps = static_cast<int>(as_int(key, value));
    } else if (key == "nonsaturating") {
      c.nonsaturating = as_bool(key, value);
    } else if (key == "snapshot_every") {
      c.snapshot_every = as_size(key, value);
    } else if (key == "snapshot_samples") {
      c.snapshot_samples = as_size(key, value);
    } else if (key == "decision_resolution") {
      c.decision_resolution = as_size(key, value);
    } else if (key == "decision_map_cells") {
      c.decision_map_cells = as_size(key, value);
    } else if (key == "optimizer") {
      c.optimizer = as_string(key, value);
    } else if (key == "learning_rate") {
      c.learning_rate = as_double(key, value);
    } else if (key == "batch") {
      c.batch = as_size(key, value);
    } else if (key == "verify_pairs") {
      c.verify_pairs = as_size(key, value);
    } else if (key == "verify_logit_fields") {
      c.verify_logit_fields = as_size(key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const ExperimentConfig& config) {
  std::ostringstream out;
  auto str = [](const std::string& s) { return '"' + s + '"'; };
  auto num_list = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += (i ? ", " : "") + fmt_double(v[i]);
    }
    return s + "]";
  };
  auto int_list = [](const auto& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += (i ? ", " : "") + std::to_string(v[i]);
    }
    return s + "]";
  };
  auto str_list = [&](const std::vector<std::string>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += (i ? ", " : "") + str(v[i]);
    }
    return s + "]";
  };
  out << "study = " << str(to_string(config.study)) << '\n';
  out << "seed = " << config.seed << '\n';
  out << "out_dir = " << str(config.out_dir) << '\n';
  out << "grid_lo = " << fmt_double(config.grid_lo) << '\n';
  out << "grid_hi = " << fmt_double(config.grid_hi) << '\n';
  out << "grid_cells = " << config.grid_cells << '\n';
  out << "eps = " << num_list(config.eps) << '\n';
  out << "data_mu = " << fmt_double(config.data_mu) << '\n';
  out << "data_sigma = " << fmt_double(config.data_sigma) << '\n';
  out << "gen_dims = " << int_list(config.gen_dims) << '\n';
  out << "kde_bandwidth = " << fmt_double(config.kde_bandwidth) << '\n';
  out << "kde_bandwidth_rule = " << str(config.kde_bandwidth_rule) << '\n';
  out << "eval_samples = " << config.eval_samples << '\n';
  out << "steps = " << config.steps << '\n';
  out << "scenario = "
      << str(config.scenario == ScenarioKind::coverage_satisfied ? "satisfied"
                                                                 : "violated")
      << '\n';
  out << "uncovered = " << str_list(config.uncovered) << '\n';
  out << "disc_x = " << num_list(config.disc_x) << '\n';
  out << "disc_y = " << num_list(config.disc_y) << '\n';
  out << "disc_r = " << num_list(config.disc_r) << '\n';
  out << "disc_class = " << int_list(config.disc_class) << '\n';
  out << "disc_label = " << str_list(config.disc_label) << '\n';
  out << "class_count = " << config.class_count << '\n';
  out << "feature_dims = " << int_list(config.feature_dims) << '\n';
  out << "gen_dims_2d = " << int_list(config.gen_dims_2d) << '\n';
  out << "latent_dim = " << config.latent_dim << '\n';
  out << "labeled_per_subdomain = " << config.labeled_per_subdomain << '\n';
  out << "unlabeled_total = " << config.unlabeled_total << '\n';
  out << "rounds = " << config.rounds << '\n';
  out << "n_disc_steps = " << config.n_disc_steps << '\n';
  out << "n_gen_steps = " << config.n_gen_steps << '\n';
  out << "nonsaturating = " << (config.nonsaturating ? "true" : "false") << '\n';
  out << "snapshot_every = " << config.snapshot_every << '\n';
  out << "snapshot_samples = " << config.snapshot_samples << '\n';
  out << "decision_resolution = " << config.decision_resolution << '\n';
  out << "decision_map_cells = " << config.decision_map_cells << '\n';
  out << "optimizer = " << str(config.optimizer) << '\n';
  out << "learning_rate = " << fmt_double(config.learning_rate) << '\n';
  out << "batch = " << config.batch << '\n';
  out << "verify_pairs = " << config.verify_pairs << '\n';
  out << "verify_logit_fields = " << config.verify_logit_fields << '\n';
  return out.str();
}

std::string config_digest(const ExperimentConfig& config) {
  const std::string echo = echo_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : echo) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::case1d: return "case1d";
    case StudyKind::case2d: return "case2d";
    case StudyKind::verify: return "verify";
  }
  return "?";
}

std::string to_string(ScenarioKind kind) {
  return kind == ScenarioKind::coverage_satisfied ? "satisfied" : "violated";
}

}  // namespace ganssl
