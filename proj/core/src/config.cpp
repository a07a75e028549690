#include "cminet/config.hpp"

#include "cminet/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cminet {

namespace {

enum class Kind { text, integer, real, boolean, real_pair, methods, rule, choice, threshold };

struct KeySpec {
  std::string key;
  std::string fallback;
  Kind kind;
  std::vector<std::string> choices;
};

std::string all_methods_text() {
  std::string s;
  for (auto m : kAllMethods) {
    if (!s.empty()) s += ',';
    s += to_string(m);
  }
  return s;
}

std::vector<KeySpec> build_registry() {
  std::vector<KeySpec> r = {
      {"input.path", "", Kind::text, {}},
      {"input.orientation", "samples_in_rows", Kind::choice, {"samples_in_rows", "taxa_in_rows"}},
      {"filter.min_prevalence", "0", Kind::real, {}},
      {"filter.min_total", "0", Kind::real, {}},
      {"methods.enabled", all_methods_text(), Kind::methods, {}},
      {"correlation.input", "clr", Kind::choice, {"clr", "proportions", "counts"}},
      {"correlation.pseudo", "0.5", Kind::real, {}},
      {"sparcc.imax", "20", Kind::integer, {}},
      {"sparcc.kmax", "10", Kind::integer, {}},
      {"sparcc.alpha", "0.1", Kind::real, {}},
      {"sparcc.Vmin", "1e-4", Kind::real, {}},
      {"spieceasi_mb.method", "mb", Kind::choice, {"mb"}},
      {"spieceasi_mb.lambda.min.ratio", "1e-2", Kind::real, {}},
      {"spieceasi_mb.nlambda", "15", Kind::integer, {}},
      {"spieceasi_mb.rep.num", "20", Kind::integer, {}},
      {"spieceasi_mb.ncores", "4", Kind::integer, {}},
      {"spieceasi_mb.pseudo", "0.5", Kind::real, {}},
      {"spieceasi_mb.stars.threshold", "0.1", Kind::real, {}},
      {"spieceasi_glasso.method", "glasso", Kind::choice, {"glasso"}},
      {"spieceasi_glasso.lambda.min.ratio", "1e-2", Kind::real, {}},
      {"spieceasi_glasso.nlambda", "15", Kind::integer, {}},
      {"spieceasi_glasso.rep.num", "50", Kind::integer, {}},
      {"spieceasi_glasso.ncores", "1", Kind::integer, {}},
      {"spieceasi_glasso.pseudo", "0.5", Kind::real, {}},
      {"spieceasi_glasso.stars.threshold", "0.1", Kind::real, {}},
      {"spring.Rmethod", "original", Kind::choice, {"original"}},
      {"spring.quantitative", "true", Kind::boolean, {}},
      {"spring.ncores", "5", Kind::integer, {}},
      {"spring.lambdaseq", "data-specific", Kind::choice, {"data-specific"}},
      {"spring.nlambda", "15", Kind::integer, {}},
      {"spring.rep.num", "20", Kind::integer, {}},
      {"spring.lambda.min.ratio", "1e-2", Kind::real, {}},
      {"spring.stars.threshold", "0.1", Kind::real, {}},
      {"gcoda.counts", "false", Kind::boolean, {}},
      {"gcoda.pseudo", "0.5", Kind::real, {}},
      {"gcoda.lambda.min.ratio", "1e-4", Kind::real, {}},
      {"gcoda.nlambda", "15", Kind::integer, {}},
      {"gcoda.ebic.gamma", "0.5", Kind::real, {}},
      {"cmimn.quantitative", "true", Kind::boolean, {}},
      {"cmimn.q1", "0.7", Kind::real, {}},
      {"cmimn.q2", "0.95", Kind::real, {}},
      {"cclasso.counts", "false", Kind::boolean, {}},
      {"cclasso.pseudo", "0.5", Kind::real, {}},
      {"cclasso.k_cv", "3", Kind::integer, {}},
      {"cclasso.lam_int", "1e-4,1", Kind::real_pair, {}},
      {"cclasso.k_max", "20", Kind::integer, {}},
      {"cclasso.n_boot", "20", Kind::integer, {}},
      {"run.seed", "42", Kind::integer, {}},
      {"run.jobs", "1", Kind::integer, {}},
      {"output.dir", "cminet_out", Kind::text, {}},
      {"render.threshold", "auto", Kind::threshold, {}},
  };
  for (auto m : kAllMethods) {
    r.push_back({"binarize." + std::string(to_string(m)), default_rule(m).describe(), Kind::rule, {}});
  }
  return r;
}

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> r = build_registry();
  return r;
}

const KeySpec* find_spec(const std::string& key) {
  for (const auto& s : registry()) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out = s.substr(b, e - b + 1);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

bool parse_real(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

bool parse_integer(const std::string& s, long long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "TRUE" || s == "True" || s == "1") return true;
  if (s == "false" || s == "FALSE" || s == "False" || s == "0") return false;
  return std::nullopt;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::pair<double, double> parse_pair(const std::string& key, const std::string& value) {
  const auto parts = split_list(value);
  double a = 0.0, b = 0.0;
  if (parts.size() != 2 || !parse_real(parts[0], a) || !parse_real(parts[1], b)) {
    throw ConfigError(key + ": expected two comma-separated numbers, got '" + value + "'");
  }
  return {a, b};
}

void check_value(const KeySpec& spec, const std::string& value) {
  const auto bad = [&](const std::string& what) {
    throw ConfigError(spec.key + ": " + what + ", got '" + value + "'");
  };
  switch (spec.kind) {
    case Kind::text:
      return;
    case Kind::integer: {
      long long v = 0;
      if (!parse_integer(value, v)) bad("expected an integer");
      return;
    }
    case Kind::real: {
      double v = 0.0;
      if (!parse_real(value, v)) bad("expected a number");
      return;
    }
    case Kind::boolean:
      if (!parse_bool(value)) bad("expected true or false");
      return;
    case Kind::real_pair:
      parse_pair(spec.key, value);
      return;
    case Kind::methods:
      for (const auto& name : split_list(value)) {
        if (!method_from_string(name)) bad("unknown method '" + name + "'");
      }
      return;
    case Kind::rule:
      try {
        BinarizationRule::parse(value);
      } catch (const RuleError& e) {
        bad(e.what());
      }
      return;
    case Kind::choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : "|") + c;
        bad("expected one of " + allowed);
      }
      return;
    case Kind::threshold: {
      long long v = 0;
      if (value != "auto" && !(parse_integer(value, v) && v >= 0)) {
        bad("expected 'auto' or a nonnegative integer");
      }
      return;
    }
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

ParamRecord CorrelationParams::record() const {
  const char* names[] = {"clr", "proportions", "counts"};
  return {{"input", std::string(names[static_cast<int>(input)])}, {"pseudo", pseudo}};
}

ParamRecord sparcc_record(const SparccParams& p) {
  return {{"imax", static_cast<long long>(p.imax)},
          {"kmax", static_cast<long long>(p.kmax)},
          {"alpha", p.alpha},
          {"Vmin", p.vmin}};
}

PipelineConfig::PipelineConfig() {
  for (const auto& s : registry()) entries_[s.key] = s.fallback;
}

std::vector<std::string> PipelineConfig::known_keys() {
  std::vector<std::string> keys;
  for (const auto& s : registry()) keys.push_back(s.key);
  return keys;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const auto* spec = find_spec(key);
  if (!spec) throw ConfigError("unknown configuration key '" + key + "'");
  const std::string v = trim(value);
  check_value(*spec, v);
  entries_[key] = v;
}

const std::string& PipelineConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
  PipelineConfig cfg;
  std::stringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (path.extension() != ".json") return parse(buffer.str());

  PipelineConfig cfg;
  try {
    const auto doc = nlohmann::json::parse(buffer.str());
    for (const auto& [key, value] : doc.at("config").items()) {
      cfg.set(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + path.string() + "': " + e.what());
  }
  return cfg;
}

std::string PipelineConfig::echo() const {
  std::string out;
  for (const auto& s : registry()) out += s.key + " = " + entries_.at(s.key) + "\n";
  return out;
}

double PipelineConfig::real(const std::string& key) const {
  double v = 0.0;
  parse_real(get(key), v);
  return v;
}

long long PipelineConfig::integer(const std::string& key) const {
  long long v = 0;
  parse_integer(get(key), v);
  return v;
}

bool PipelineConfig::boolean(const std::string& key) const { return *parse_bool(get(key)); }

std::filesystem::path PipelineConfig::input_path() const { return get("input.path"); }

Orientation PipelineConfig::orientation() const {
  return get("input.orientation") == "taxa_in_rows" ? Orientation::taxa_in_rows
                                                    : Orientation::samples_in_rows;
}

double PipelineConfig::min_prevalence() const { return real("filter.min_prevalence"); }
double PipelineConfig::min_total() const { return real("filter.min_total"); }

std::vector<Method> PipelineConfig::methods() const {
  std::vector<Method> out;
  for (const auto& name : split_list(get("methods.enabled"))) out.push_back(*method_from_string(name));
  return out;
}

BinarizationRule PipelineConfig::rule(Method m) const {
  return BinarizationRule::parse(get("binarize." + std::string(to_string(m))));
}

std::uint64_t PipelineConfig::seed() const { return static_cast<std::uint64_t>(integer("run.seed")); }
int PipelineConfig::jobs() const { return static_cast<int>(integer("run.jobs")); }
std::filesystem::path PipelineConfig::output_dir() const { return get("output.dir"); }

std::optional<int> PipelineConfig::render_threshold() const {
  if (get("render.threshold") == "auto") return std::nullopt;
  return static_cast<int>(integer("render.threshold"));
}

CorrelationParams PipelineConfig::correlation() const {
  CorrelationParams p;
  const auto& input = get("correlation.input");
  p.input = input == "clr" ? CorrelationInput::clr
            : input == "proportions" ? CorrelationInput::proportions
                                     : CorrelationInput::counts;
  p.pseudo = real("correlation.pseudo");
  return p;
}

SparccParams PipelineConfig::sparcc() const {
  SparccParams p;
  p.imax = static_cast<int>(integer("sparcc.imax"));
  p.kmax = static_cast<int>(integer("sparcc.kmax"));
  p.alpha = real("sparcc.alpha");
  p.vmin = real("sparcc.Vmin");
  return p;
}

SpiecEasiParams PipelineConfig::spieceasi(SpiecEasiMode mode) const {
  const std::string prefix = mode == SpiecEasiMode::mb ? "spieceasi_mb." : "spieceasi_glasso.";
  auto p = SpiecEasiParams::defaults(mode);
  p.lambda_min_ratio = real(prefix + "lambda.min.ratio");
  p.nlambda = static_cast<int>(integer(prefix + "nlambda"));
  p.rep_num = static_cast<int>(integer(prefix + "rep.num"));
  p.ncores = static_cast<int>(integer(prefix + "ncores"));
  p.pseudo = real(prefix + "pseudo");
  p.stars_threshold = real(prefix + "stars.threshold");
  return p;
}

SpringParams PipelineConfig::spring() const {
  SpringParams p;
  p.rmethod = get("spring.Rmethod");
  p.quantitative = boolean("spring.quantitative");
  p.ncores = static_cast<int>(integer("spring.ncores"));
  p.lambdaseq = get("spring.lambdaseq");
  p.nlambda = static_cast<int>(integer("spring.nlambda"));
  p.rep_num = static_cast<int>(integer("spring.rep.num"));
  p.lambda_min_ratio = real("spring.lambda.min.ratio");
  p.stars_threshold = real("spring.stars.threshold");
  return p;
}

GcodaParams PipelineConfig::gcoda() const {
  GcodaParams p;
  p.counts = boolean("gcoda.counts");
  p.pseudo = real("gcoda.pseudo");
  p.lambda_min_ratio = real("gcoda.lambda.min.ratio");
  p.nlambda = static_cast<int>(integer("gcoda.nlambda"));
  p.ebic_gamma = real("gcoda.ebic.gamma");
  return p;
}

CmimnParams PipelineConfig::cmimn() const {
  CmimnParams p;
  p.quantitative = boolean("cmimn.quantitative");
  p.q1 = real("cmimn.q1");
  p.q2 = real("cmimn.q2");
  return p;
}

CclassoParams PipelineConfig::cclasso() const {
  CclassoParams p;
  p.counts = boolean("cclasso.counts");
  p.pseudo = real("cclasso.pseudo");
  p.k_cv = static_cast<int>(integer("cclasso.k_cv"));
  p.lam_int = parse_pair("cclasso.lam_int", get("cclasso.lam_int"));
  p.k_max = static_cast<int>(integer("cclasso.k_max"));
  p.n_boot = static_cast<int>(integer("cclasso.n_boot"));
  return p;
}

void PipelineConfig::validate() const {
  require(!get("input.path").empty(), "input.path is required");
  const auto ms = methods();
  std::set<Method> distinct(ms.begin(), ms.end());
  require(distinct.size() == ms.size(), "methods.enabled lists a method twice");
  require(ms.size() >= 2, "at least two methods must be enabled for a consensus");

  const double prevalence = min_prevalence();
  require(prevalence >= 0.0 && prevalence <= 1.0, "filter.min_prevalence must lie in [0, 1]");
  require(min_total() >= 0.0, "filter.min_total must be nonnegative");
  require(jobs() >= 1, "run.jobs must be at least 1");
  require(integer("run.seed") >= 0, "run.seed must be nonnegative");

  const auto corr = correlation();
  require(corr.pseudo > 0.0, "correlation.pseudo must be positive");

  const auto sp = sparcc();
  require(sp.imax >= 1, "sparcc.imax must be at least 1");
  require(sp.kmax >= 0, "sparcc.kmax must be nonnegative");
  require(sp.alpha > 0.0 && sp.alpha < 1.0, "sparcc.alpha must lie in (0, 1)");
  require(sp.vmin > 0.0, "sparcc.Vmin must be positive");

  for (auto mode : {SpiecEasiMode::mb, SpiecEasiMode::glasso}) {
    const auto p = spieceasi(mode);
    const std::string prefix = mode == SpiecEasiMode::mb ? "spieceasi_mb." : "spieceasi_glasso.";
    require(p.lambda_min_ratio > 0.0 && p.lambda_min_ratio < 1.0,
            prefix + "lambda.min.ratio must lie in (0, 1)");
    require(p.nlambda >= 2, prefix + "nlambda must be at least 2");
    require(p.rep_num >= 1, prefix + "rep.num must be at least 1");
    require(p.ncores >= 1, prefix + "ncores must be at least 1");
    require(p.pseudo > 0.0, prefix + "pseudo must be positive");
    require(p.stars_threshold > 0.0 && p.stars_threshold < 1.0,
            prefix + "stars.threshold must lie in (0, 1)");
  }

  const auto sg = spring();
  require(sg.lambda_min_ratio > 0.0 && sg.lambda_min_ratio < 1.0,
          "spring.lambda.min.ratio must lie in (0, 1)");
  require(sg.nlambda >= 2, "spring.nlambda must be at least 2");
  require(sg.rep_num >= 1, "spring.rep.num must be at least 1");
  require(sg.ncores >= 1, "spring.ncores must be at least 1");
  require(sg.stars_threshold > 0.0 && sg.stars_threshold < 1.0,
          "spring.stars.threshold must lie in (0, 1)");

  const auto gc = gcoda();
  require(gc.pseudo > 0.0, "gcoda.pseudo must be positive");
  require(gc.lambda_min_ratio > 0.0 && gc.lambda_min_ratio < 1.0,
          "gcoda.lambda.min.ratio must lie in (0, 1)");
  require(gc.nlambda >= 2, "gcoda.nlambda must be at least 2");
  require(gc.ebic_gamma >= 0.0, "gcoda.ebic.gamma must be nonnegative");

  const auto cm = cmimn();
  require(cm.q1 > 0.0 && cm.q1 <= cm.q2 && cm.q2 < 1.0, "cmimn quantiles need 0 < q1 <= q2 < 1");

  const auto cc = cclasso();
  require(cc.pseudo > 0.0, "cclasso.pseudo must be positive");
  require(cc.k_cv >= 2, "cclasso.k_cv must be at least 2");
  require(cc.lam_int.first > 0.0 && cc.lam_int.second > cc.lam_int.first,
          "cclasso.lam_int must be an increasing pair of positive numbers");
  require(cc.k_max >= 2, "cclasso.k_max must be at least 2");
  require(cc.n_boot >= 1, "cclasso.n_boot must be at least 1");

  for (auto m : kAllMethods) {
    const auto r = rule(m);
    const std::string key = "binarize." + std::string(to_string(m));
    const bool weighted = !emits_network(m) || m == Method::cmimn;
    switch (r.kind) {
      case BinarizationRule::Kind::native_sparse:
        require(emits_network(m), key + ": native_sparse needs a method with a native network");
        break;
      case BinarizationRule::Kind::abs_threshold:
        require(weighted, key + ": method has no weighted matrix");
        require(r.value > 0.0 && r.value <= 1.0,
                key + ": abs_threshold must lie in (0, 1]");
        break;
      case BinarizationRule::Kind::top_quantile:
        require(weighted, key + ": method has no weighted matrix");
        require(r.value > 0.0 && r.value < 1.0, key + ": top_quantile must lie in (0, 1)");
        break;
      case BinarizationRule::Kind::pvalue:
        require(m == Method::cclasso, key + ": only cclasso reports p-values");
        require(r.value > 0.0 && r.value <= 1.0, key + ": alpha must lie in (0, 1]");
        break;
    }
  }
}

}  // namespace cminet
