#include "selfapprox/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "selfapprox/characters.hpp"
#include "selfapprox/density.hpp"
#include "selfapprox/diophantine.hpp"
#include "selfapprox/errors.hpp"
#include "selfapprox/lfunc.hpp"
#include "selfapprox/meanvalue.hpp"
#include "selfapprox/primes.hpp"

namespace selfapprox::cli {

namespace {

const std::string kScan = "scan-density";
const std::string kDist = "dist-fn";
const std::string kKron = "kronecker";
const std::string kFind = "find-tau";
const std::string kMean = "mean-value";
const std::string kB2 = "b2";
const std::string kRel = "relations";
const std::string kSelf = "selfcheck";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v < 0.0 || v != std::floor(v) || v > 9007199254740992.0)
    throw ConfigError("key '" + key + "': '" + text + "' is not a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::int64_t parse_integer(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v != std::floor(v) || std::abs(v) > 9007199254740992.0)
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  return static_cast<std::int64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("key '" + key + "': '" + text + "' is not a boolean");
}

const KeySpec& spec(const std::string& key) {
  for (const auto& k : key_registry())
    if (k.name == key) return k;
  throw ConfigError("unknown key '" + key + "'");
}

void check_choice(const RunConfig& c, const std::string& key, std::initializer_list<const char*> choices) {
  const auto& v = c.text(key);
  for (const char* choice : choices)
    if (v == choice) return;
  std::string list;
  for (const char* choice : choices) list += std::string(list.empty() ? "" : "|") + choice;
  throw ConfigError("key '" + key + "': '" + v + "' is not one of " + list);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{kScan, kDist, kKron, kFind, kMean, kB2, kRel, kSelf};
  return names;
}

const std::vector<KeySpec>& key_registry() {
  using K = KeyType;
  const std::vector<std::string> evaluator{kScan, kDist, kMean, kB2};
  const std::vector<std::string> region{kScan, kDist, kMean, kB2};
  const std::vector<std::string> sampled{kScan, kDist, kKron, kMean, kB2};
  const std::vector<std::string> target{kKron, kFind, kMean};
  const std::vector<std::string> relation{kKron, kFind, kMean, kRel};
  static const std::vector<KeySpec> registry{
      {"seed", K::kCount, "1", "master seed", sampled, {}},
      {"threads", K::kCount, "1", "worker threads; results do not depend on it", {}, {}},
      {"output-dir", K::kString, "out", "artifact directory", {}, {}},
      {"format", K::kString, "csv", "csv, or json to add plotdata.json", {}, {}},
      {"em-order", K::kInteger, "24", "Euler-Maclaurin order (even, 2..60)", evaluator, {}},
      {"shift-factor", K::kReal, "1.3", "N0 >= shift-factor * (|t| + 10)", evaluator, {}},
      {"min-terms", K::kCount, "50", "smallest N0", evaluator, {}},
      {"target-abs-error", K::kReal, "1e-10", "evaluator absolute error target", evaluator, {}},
      {"t-cap", K::kReal, "5e4", "largest supported |Im s|", evaluator, {}},
      {"sigma-lo", K::kReal, "0.65", "K: lower sigma", region, {}},
      {"sigma-hi", K::kReal, "0.75", "K: upper sigma", region, {}},
      {"t-lo", K::kReal, "-0.5", "K: lower t", region, {}},
      {"t-hi", K::kReal, "0.5", "K: upper t", region, {}},
      {"margin", K::kReal, "0.1", "distance d from K to the boundary of U", region, {}},
      {"grid-sigma", K::kCount, "5", "sample points on K along sigma", region, {}},
      {"grid-t", K::kCount, "5", "sample points on K along t", region, {}},
      {"shifts", K::kTextList, "1,2", "shifts d_1,...,d_m (p/q, decimals, sqrt(r))",
       {kScan, kDist, kKron, kFind, kMean, kB2, kRel}, {"d"}},
      {"chars", K::kTextList, "4:1", "characters q:index, one per shift or one for all", {kScan, kDist, kMean, kB2},
       {}},
      {"T", K::kReal, "2000", "horizon", sampled, {}},
      {"samples", K::kCount, "1000", "Monte Carlo samples", sampled, {}},
      {"sampling", K::kString, "uniform", "uniform|stratified", {kScan, kDist, kKron}, {}},
      {"refine", K::kBool, "true", "recompute g on the doubled grid", {kScan, kDist}, {}},
      {"eps", K::kRealList, "1", "thresholds epsilon", {kScan}, {}},
      {"samples-in", K::kString, "", "reuse a samples.csv instead of evaluating L", {kScan}, {}},
      {"T-ladder", K::kRealList, "", "increasing horizons for the convergence diagnostic", {kDist}, {}},
      {"grid-points", K::kCount, "50", "quantile points in the continuity-safe grid", {kDist}, {}},
      {"jump-mass", K::kReal, "0.05", "pooled share that flags a jump cluster", {kDist}, {}},
      {"primes-upto", K::kReal, "5", "prime bound v", target, {}},
      {"delta", K::kReal, "0.1", "Kronecker tolerance delta", target, {}},
      {"relation-mode", K::kString, "auto", "auto|exact|float", relation, {}},
      {"tolerance", K::kReal, "1e-10", "float-mode relation tolerance", relation, {}},
      {"coeff-cap", K::kCount, "1000000", "largest relation coefficient", relation, {}},
      {"search-bound", K::kReal, "1e4", "tau search interval [0, bound]", {kFind}, {}},
      {"strategy", K::kString, "grid", "grid|lattice", {kFind}, {}},
      {"kind", K::kString, "carlson", "carlson|tail", {kMean}, {}},
      {"sigma", K::kReal, "0.75", "Re s", {kMean}, {}},
      {"s-imag", K::kReal, "0", "Im s", {kMean}, {}},
      {"y", K::kRealList, "20", "truncation points y", {kMean}, {}},
      {"x", K::kReal, "1", "shift scale x", {kMean}, {}},
      {"truncation", K::kString, "euler", "euler|partial", {kMean}, {}},
      {"cells", K::kCount, "6", "midpoint cells per side of U", {kMean}, {}},
      {"N-ladder", K::kCountList, "10,100,1000", "partial-sum lengths", {kB2}, {}},
      {"pair", K::kCountList, "0,1", "indices j,k of the compared shifts", {kB2}, {}},
      {"check-primes-upto", K::kReal, "0", "log-prime independence check bound (0: skip)", {kRel}, {}},
      {"precision-digits", K::kCount, "30", "digits for the log-prime check", {kRel}, {}},
  };
  return registry;
}

std::optional<std::string> canonical_key(const std::string& name) {
  for (const auto& k : key_registry()) {
    if (k.name == name) return k.name;
    for (const auto& a : k.aliases)
      if (a == name) return k.name;
  }
  return std::nullopt;
}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

double RunConfig::real(const std::string& key) const { return parse_real(key, text(key)); }
std::uint64_t RunConfig::count(const std::string& key) const { return parse_count(key, text(key)); }
std::int64_t RunConfig::integer(const std::string& key) const { return parse_integer(key, text(key)); }
bool RunConfig::flag(const std::string& key) const { return parse_bool(key, text(key)); }

std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(text(key))) out.push_back(parse_real(key, item));
  return out;
}

std::vector<std::uint64_t> RunConfig::counts(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text(key))) out.push_back(parse_count(key, item));
  return out;
}

std::vector<std::string> RunConfig::texts(const std::string& key) const { return split_list(text(key)); }

Json RunConfig::typed(const std::string& key) const {
  switch (spec(key).type) {
    case KeyType::kString: return text(key);
    case KeyType::kReal: return real(key);
    case KeyType::kCount: return count(key);
    case KeyType::kInteger: return integer(key);
    case KeyType::kBool: return flag(key);
    case KeyType::kRealList: return reals(key);
    case KeyType::kCountList: return counts(key);
    case KeyType::kTextList: return texts(key);
  }
  return text(key);
}

Json RunConfig::manifest() const {
  Json m;
  m["program"] = "selfapprox";
  m["command"] = command;
  Json cfg = Json::object();
  for (const auto& k : key_registry()) cfg[k.name] = text(k.name);
  m["config"] = cfg;
  return m;
}

Json RunConfig::parameters() const {
  Json p = Json::object();
  for (const auto& k : key_registry())
    if (std::find(k.commands.begin(), k.commands.end(), command) != k.commands.end()) p[k.name] = typed(k.name);
  return p;
}

namespace {

std::string json_to_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + json_to_text(e);
    return out;
  }
  if (v.is_number()) return v.dump();
  throw ConfigError("config value " + v.dump() + " is not a scalar or list");
}

}  // namespace

ConfigSource read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  ConfigSource source;
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    Json doc;
    try {
      doc = Json::parse(content);
    } catch (const Json::parse_error& e) {
      throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    const Json* values = &doc;
    if (doc.contains("config")) {
      values = &doc["config"];
      if (doc.contains("command")) source.command = doc["command"].get<std::string>();
      for (const auto& [k, v] : doc.items())
        if (k != "config" && k != "command" && k != "program")
          throw ConfigError("unknown manifest member '" + k + "' in '" + path.string() + "'");
    }
    if (!values->is_object()) throw ConfigError("config in '" + path.string() + "' is not an object");
    for (const auto& [k, v] : values->items()) {
      if (k == "command" && values == &doc) {
        source.command = v.get<std::string>();
        continue;
      }
      source.values[k] = json_to_text(v);
    }
    return source;
  }
  std::istringstream lines(content);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "command") {
      source.command = value;
    } else {
      source.values[key] = value;
    }
  }
  return source;
}

void validate(const RunConfig& c) {
  if (std::find(command_names().begin(), command_names().end(), c.command) == command_names().end())
    throw ConfigError("unknown command '" + c.command + "'");
  for (const auto& k : key_registry()) static_cast<void>(c.typed(k.name));
  check_choice(c, "format", {"csv", "json"});
  check_choice(c, "sampling", {"uniform", "stratified"});
  check_choice(c, "relation-mode", {"auto", "exact", "float"});
  check_choice(c, "strategy", {"grid", "lattice"});
  check_choice(c, "kind", {"carlson", "tail"});
  check_choice(c, "truncation", {"euler", "partial"});
  if (c.count("threads") < 1 || c.count("threads") > 256) throw ConfigError("key 'threads' must lie in 1..256");
}

RunConfig resolve(std::optional<std::string> command, const std::map<std::string, std::string>& command_line,
                  const std::optional<std::string>& env_output_dir) {
  RunConfig c;
  for (const auto& k : key_registry()) c.values[k.name] = k.default_value;
  auto apply = [&c](const std::map<std::string, std::string>& values, const std::string& origin) {
    for (const auto& [key, value] : values) {
      const auto canonical = canonical_key(key);
      if (!canonical) throw ConfigError("unknown key '" + key + "' in " + origin);
      c.values[*canonical] = value;
    }
  };
  std::map<std::string, std::string> cli = command_line;
  if (const auto it = cli.find("config"); it != cli.end()) {
    const auto source = read_config_file(it->second);
    apply(source.values, "config file '" + it->second + "'");
    if (!command && source.command) command = source.command;
    cli.erase(it);
  }
  if (env_output_dir && !env_output_dir->empty()) c.values["output-dir"] = *env_output_dir;
  apply(cli, "command line");
  if (!command || command->empty()) throw ConfigError("no command given");
  c.command = *command;
  validate(c);
  return c;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

namespace {

EvaluatorConfig evaluator(const RunConfig& c) {
  EvaluatorConfig cfg;
  cfg.em_order = static_cast<int>(c.integer("em-order"));
  cfg.shift_factor = c.real("shift-factor");
  cfg.min_terms = c.count("min-terms");
  cfg.target_abs_error = c.real("target-abs-error");
  cfg.t_cap = c.real("t-cap");
  cfg.validate();
  return cfg;
}

StripRegion strip(const RunConfig& c) {
  StripRegion r;
  r.sigma_lo = c.real("sigma-lo");
  r.sigma_hi = c.real("sigma-hi");
  r.t_lo = c.real("t-lo");
  r.t_hi = c.real("t-hi");
  r.margin = c.real("margin");
  r.grid_sigma = static_cast<int>(std::min<std::uint64_t>(c.count("grid-sigma"), 10000));
  r.grid_t = static_cast<int>(std::min<std::uint64_t>(c.count("grid-t"), 10000));
  r.validate();
  return r;
}

std::vector<Shift> shift_list(const RunConfig& c) {
  std::vector<Shift> out;
  for (const auto& text : c.texts("shifts")) out.push_back(parse_shift(text));
  if (out.empty()) throw ConfigError("key 'shifts' is empty");
  return out;
}

std::vector<DirichletCharacter> character_list(const RunConfig& c, std::size_t m) {
  const auto ids = c.texts("chars");
  if (ids.empty()) throw ConfigError("key 'chars' is empty");
  if (ids.size() != 1 && ids.size() != m)
    throw ConfigError("key 'chars' needs one id or one per shift (" + std::to_string(m) + ")");
  std::vector<DirichletCharacter> out;
  for (std::size_t k = 0; k < m; ++k) out.push_back(parse_character(ids.size() == 1 ? ids[0] : ids[k]));
  return out;
}

ShiftFamily shift_family(const RunConfig& c) {
  ShiftFamily f;
  for (const auto& s : shift_list(c)) f.shifts.push_back(s.value);
  f.characters = character_list(c, f.shifts.size());
  f.validate();
  return f;
}

SamplingOptions sampling_options(const RunConfig& c) {
  SamplingOptions o;
  o.n_samples = c.count("samples");
  if (o.n_samples < 1) throw ConfigError("key 'samples' must be positive");
  o.seed = c.count("seed");
  o.sampling = c.text("sampling") == "stratified" ? Sampling::kStratified : Sampling::kUniform;
  o.threads = static_cast<unsigned>(c.count("threads"));
  o.refine = c.flag("refine");
  return o;
}

double positive_T(const RunConfig& c) {
  const double T = c.real("T");
  if (!(T > 0.0)) throw ConfigError("key 'T' must be positive");
  return T;
}

RelationOptions relation_options(const RunConfig& c, std::span<const Shift> shifts) {
  RelationOptions o;
  const auto& mode = c.text("relation-mode");
  bool exact = mode == "exact";
  if (mode == "auto")
    exact = std::all_of(shifts.begin(), shifts.end(), [](const Shift& s) { return s.exact.has_value(); });
  o.mode = exact ? RelationMode::kExact : RelationMode::kFloat;
  o.tolerance = c.real("tolerance");
  o.coeff_cap = static_cast<std::int64_t>(c.count("coeff-cap"));
  return o;
}

Json relation_json(const LinearRelation& r) {
  Json j;
  j["mode"] = r.mode == RelationMode::kExact ? "exact" : "float";
  j["status"] = r.mode == RelationMode::kExact ? "exact" : "at precision";
  j["independent_indices"] = r.independent_indices;
  j["dependent_indices"] = r.dependent_indices;
  j["denominator"] = r.denominator;
  j["coefficients"] = r.coefficients;
  j["bound_A"] = r.bound_A;
  j["max_residual"] = r.max_residual;
  return j;
}

struct TargetSetup {
  std::vector<Shift> shifts;
  LinearRelation relation;
  KroneckerTarget target;
};

TargetSetup target_setup(const RunConfig& c) {
  TargetSetup s;
  s.shifts = shift_list(c);
  s.relation = find_rational_relations(s.shifts, relation_options(c, s.shifts));
  std::vector<double> independent;
  for (auto i : s.relation.independent_indices) independent.push_back(s.shifts[i].value);
  s.target = make_kronecker_target(independent, s.relation.denominator, c.real("delta"), c.real("primes-upto"));
  return s;
}

Json target_json(const KroneckerTarget& t) {
  Json j;
  j["shifts"] = t.shifts;
  j["denominator"] = t.denominator;
  j["delta"] = t.delta;
  j["prime_bound"] = t.prime_bound;
  j["primes"] = t.primes;
  j["dimension"] = t.dimension();
  j["expected_density"] = t.expected_density;
  return j;
}

std::string samples_csv(std::span<const GSample> samples) {
  std::string out = "tau,g_value,refine_delta\n";
  for (const auto& s : samples)
    out += format_real(s.tau) + "," + format_real(s.g) + "," + format_real(s.refine_delta) + "\n";
  return out;
}

std::vector<GSample> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read samples file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "tau,g_value,refine_delta")
    throw ConfigError("samples file '" + path + "' lacks the header tau,g_value,refine_delta");
  std::vector<GSample> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_list(line);
    if (fields.size() != 3) throw ConfigError("samples file '" + path + "': malformed row '" + line + "'");
    out.push_back({parse_real("tau", fields[0]), parse_real("g_value", fields[1]),
                   parse_real("refine_delta", fields[2])});
  }
  if (out.empty()) throw ConfigError("samples file '" + path + "' has no rows");
  return out;
}

Json estimate_json(const DensityEstimate& e) {
  Json j;
  j["epsilon"] = e.epsilon;
  j["horizon"] = e.horizon;
  j["n_samples"] = e.n_samples;
  j["hits"] = e.hits;
  j["density"] = e.density;
  j["ci_lo"] = e.ci_lo;
  j["ci_hi"] = e.ci_hi;
  return j;
}

Json sample_summary(std::span<const GSample> samples, double T) {
  const auto dist = distribution_from_samples(samples, T);
  double max_delta = 0.0;
  double sum_delta = 0.0;
  for (const auto& s : samples) {
    max_delta = std::max(max_delta, s.refine_delta);
    sum_delta += s.refine_delta;
  }
  Json j;
  j["g_min"] = dist.quantile(0.0);
  j["g_median"] = dist.quantile(0.5);
  j["g_max"] = dist.quantile(1.0);
  j["max_refine_delta"] = max_delta;
  j["mean_refine_delta"] = sum_delta / static_cast<double>(samples.size());
  return j;
}

Json quantiles_json(const EmpiricalDistribution& d) {
  Json q;
  for (double p : {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95}) q[format_real(p)] = d.quantile(p);
  return q;
}

Outcome scan_density(const RunConfig& c) {
  const auto cfg = evaluator(c);
  const auto region = strip(c);
  const auto family = shift_family(c);
  const double T = positive_T(c);
  const auto eps = c.reals("eps");
  if (eps.empty()) throw ConfigError("key 'eps' is empty");
  for (double e : eps)
    if (!(e > 0.0)) throw ConfigError("key 'eps': every epsilon must be positive");
  Outcome out;
  std::vector<GSample> samples;
  const auto& source = c.text("samples-in");
  if (!source.empty()) {
    samples = read_samples_csv(source);
  } else {
    check_horizon(T, family, region, cfg);
    samples = sample_g(T, family, region, cfg, sampling_options(c));
  }
  Json estimates = Json::array();
  for (double e : eps) {
    const auto est = density_from_samples(samples, e, T);
    estimates.push_back(estimate_json(est));
    out.plot.push_back({"density", e, est.density});
  }
  out.results["estimates"] = estimates;
  out.results["samples"] = sample_summary(samples, T);
  out.results["largest_usable_T"] = largest_usable_horizon(family, region, cfg);
  out.samples_csv = samples_csv(samples);
  return out;
}

Outcome dist_fn(const RunConfig& c) {
  const auto cfg = evaluator(c);
  const auto region = strip(c);
  const auto family = shift_family(c);
  auto ladder = c.reals("T-ladder");
  const bool diagnostic = !ladder.empty();
  if (!diagnostic) ladder = {positive_T(c)};
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw ConfigError("key 'T-ladder': horizons must be positive");
    if (i > 0 && !(ladder[i] > ladder[i - 1])) throw ConfigError("key 'T-ladder' must be increasing");
  }
  check_horizon(ladder.back(), family, region, cfg);
  auto options = sampling_options(c);
  Outcome out;
  std::vector<EmpiricalDistribution> dists;
  std::vector<GSample> all;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (diagnostic) options.stream = streams::kLadderBase + i;
    const auto samples = sample_g(ladder[i], family, region, cfg, options);
    all.insert(all.end(), samples.begin(), samples.end());
    dists.push_back(distribution_from_samples(samples, ladder[i]));
  }
  DiagnosticOptions diag;
  diag.grid_points = static_cast<int>(std::clamp<std::uint64_t>(c.count("grid-points"), 1, 100000));
  diag.jump_mass = c.real("jump-mass");
  const auto report = analyze_ladder(dists, diag);

  Json rungs = Json::array();
  for (const auto& d : report.distributions) {
    Json r;
    r["T"] = d.horizon();
    r["n_samples"] = d.size();
    r["F_at_zero"] = d.cdf(0.0);
    r["quantiles"] = quantiles_json(d);
    rungs.push_back(r);
  }
  out.results["distributions"] = rungs;
  out.results["x_grid"] = report.x_grid;
  Json clusters = Json::array();
  for (const auto& cl : report.jump_clusters) clusters.push_back({{"lo", cl.lo}, {"hi", cl.hi}, {"mass", cl.mass}});
  out.results["jump_clusters"] = clusters;
  Json steps = Json::array();
  for (const auto& s : report.steps)
    steps.push_back({{"T_from", s.T_from}, {"T_to", s.T_to}, {"sup_distance", s.sup_distance},
                     {"threshold", s.threshold}});
  out.results["steps"] = steps;
  out.results["nonincreasing_trend"] = report.nonincreasing_trend;
  for (const auto& d : report.distributions) {
    const std::string series = "F_T=" + format_real(d.horizon());
    for (double x : report.x_grid) out.plot.push_back({series, x, d.cdf(x)});
  }
  out.samples_csv = samples_csv(all);
  return out;
}

Outcome kronecker(const RunConfig& c) {
  const auto setup = target_setup(c);
  const double T = positive_T(c);
  const auto options = sampling_options(c);
  const auto r = measure_kronecker_density(setup.target, T, options.n_samples, options.seed, options.sampling,
                                           options.threads);
  Outcome out;
  out.results["relation"] = relation_json(setup.relation);
  out.results["target"] = target_json(setup.target);
  out.results["density"] = r.density;
  out.results["hits"] = r.hits;
  out.results["n_samples"] = r.samples;
  out.results["ci_lo"] = r.ci.lo;
  out.results["ci_hi"] = r.ci.hi;
  out.results["standard_error"] = r.standard_error;
  out.results["expected_density"] = r.expected;
  out.results["relative_error"] = (r.density - r.expected) / r.expected;
  out.results["within_3_se"] = std::abs(r.density - r.expected) <= 3.0 * r.standard_error;
  out.plot.push_back({"measured", T, r.density});
  out.plot.push_back({"expected", T, r.expected});
  return out;
}

Outcome find_tau(const RunConfig& c) {
  const auto setup = target_setup(c);
  const double bound = c.real("search-bound");
  if (!(bound >= 0.0)) throw ConfigError("key 'search-bound' must be nonnegative");
  const auto strategy = c.text("strategy") == "lattice" ? TauSearch::kLattice : TauSearch::kGrid;
  const auto taus = find_tau_in_set(setup.target, bound, strategy);
  bool verified = true;
  for (double tau : taus) verified = verified && in_kronecker_set(tau, setup.target);
  Outcome out;
  out.results["relation"] = relation_json(setup.relation);
  out.results["target"] = target_json(setup.target);
  out.results["strategy"] = c.text("strategy");
  out.results["search_bound"] = bound;
  out.results["grid_step"] = grid_step(setup.target);
  out.results["count"] = taus.size();
  out.results["all_verified"] = verified;
  out.results["taus"] = taus;
  if (taus.size() <= 1) out.results["note"] = "no positive tau found; try a larger search-bound";
  for (std::size_t i = 0; i < taus.size(); ++i) out.plot.push_back({"tau", static_cast<double>(i), taus[i]});
  return out;
}

Outcome mean_value(const RunConfig& c) {
  Outcome out;
  const auto ys = c.reals("y");
  if (ys.empty()) throw ConfigError("key 'y' is empty");
  const double T = positive_T(c);
  auto options = sampling_options(c);
  const auto chars = c.texts("chars");
  if (chars.empty()) throw ConfigError("key 'chars' is empty");
  const auto chi = parse_character(chars.front());
  out.results["kind"] = c.text("kind");
  if (c.text("kind") == "carlson") {
    const auto cfg = evaluator(c);
    const Complex s(c.real("sigma"), c.real("s-imag"));
    const auto truncation = c.text("truncation") == "partial" ? Truncation::kPartialSum : Truncation::kEulerProduct;
    const auto results = carlson_mean_values(chi, s, ys, c.real("x"), T, options, truncation, cfg);
    Json entries = Json::array();
    for (const auto& r : results) {
      Json e;
      e["y"] = r.y;
      e["empirical"] = r.empirical;
      e["standard_error"] = r.standard_error;
      e["theoretical"] = r.theoretical;
      e["limit"] = r.limit;
      e["relative_gap_theoretical"] = (r.empirical - r.theoretical) / r.theoretical;
      e["relative_gap_limit"] = (r.empirical - r.limit) / r.limit;
      entries.push_back(e);
      out.plot.push_back({"empirical", r.y, r.empirical});
      out.plot.push_back({"theoretical", r.y, r.theoretical});
      out.plot.push_back({"limit", r.y, r.limit});
    }
    out.results["truncation"] = c.text("truncation");
    out.results["entries"] = entries;
    return out;
  }
  const auto region = strip(c);
  const auto setup = target_setup(c);
  std::vector<double> shifts;
  for (const auto& s : setup.shifts) shifts.push_back(s.value);
  const int cells = static_cast<int>(std::clamp<std::uint64_t>(c.count("cells"), 1, 1000));
  const auto r = truncation_tail_check(chi, shifts, setup.target, region, ys.front(), T, options, cells);
  out.results["relation"] = relation_json(setup.relation);
  out.results["target"] = target_json(setup.target);
  Json j;
  j["v"] = r.v;
  j["y"] = r.y;
  j["sigma1"] = r.sigma1;
  j["meas_R"] = r.meas_R;
  j["prime_tail"] = r.prime_tail;
  j["empirical"] = r.empirical;
  j["standard_error"] = r.standard_error;
  j["bound"] = r.bound;
  j["ratio"] = r.ratio;
  j["predicted"] = r.predicted;
  j["hits"] = r.hits;
  j["n_samples"] = r.samples;
  j["warning"] = r.warning;
  out.results["tail"] = j;
  out.plot.push_back({"ratio", r.v, r.ratio});
  return out;
}

Outcome b2(const RunConfig& c) {
  const auto cfg = evaluator(c);
  const auto region = strip(c);
  const auto family = shift_family(c);
  const auto pair = c.counts("pair");
  if (pair.size() != 2) throw ConfigError("key 'pair' needs two indices");
  const auto ladder = c.counts("N-ladder");
  const double T = positive_T(c);
  const auto r = b2_distance(family, ladder, T, region, cfg, sampling_options(c), pair[0], pair[1]);
  Outcome out;
  Json entries = Json::array();
  for (const auto& e : r.ladder) {
    entries.push_back({{"N", e.N},
                       {"distance", e.distance},
                       {"standard_error", e.standard_error},
                       {"decomposed_bound", e.decomposed_bound},
                       {"triangle_violations", e.triangle_violations},
                       {"decomposition_violations", e.decomposition_violations}});
    out.plot.push_back({"distance", static_cast<double>(e.N), e.distance});
    out.plot.push_back({"decomposed_bound", static_cast<double>(e.N), e.decomposed_bound});
  }
  out.results["horizon"] = r.horizon;
  out.results["n_samples"] = r.samples;
  out.results["ladder"] = entries;
  out.results["decreasing"] = r.decreasing;
  return out;
}

Outcome relations(const RunConfig& c) {
  const auto shifts = shift_list(c);
  const auto relation = find_rational_relations(shifts, relation_options(c, shifts));
  Outcome out;
  out.results["relation"] = relation_json(relation);
  const double bound = c.real("check-primes-upto");
  if (bound >= 2.0) {
    const auto primes = primes_up_to(bound);
    const std::vector<std::uint32_t> list(primes.begin(), primes.end());
    const auto report = check_log_prime_independence(shifts, list, static_cast<int>(c.count("precision-digits")),
                                                     static_cast<std::int64_t>(c.count("coeff-cap")));
    Json j;
    j["relation_found"] = report.relation_found;
    j["coefficients"] = report.coefficients;
    j["residual"] = report.residual;
    j["precision_digits"] = report.precision_digits;
    j["coeff_cap"] = report.coeff_cap;
    j["terms"] = report.terms;
    j["norm_bound"] = report.norm_bound;
    j["precision_exhausted"] = report.precision_exhausted;
    j["verdict"] = report.relation_found ? "candidate relation found"
                   : report.precision_exhausted
                       ? "precision exhausted before the coefficient cap was excluded"
                       : "no relation with coefficients <= cap at this precision";
    out.results["log_prime_independence"] = j;
  }
  for (std::size_t k = 0; k < shifts.size(); ++k) out.plot.push_back({"shift", static_cast<double>(k), shifts[k].value});
  return out;
}

Outcome selfcheck(const RunConfig&) {
  Outcome out;
  Json checks = Json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool passed, double value, double expected) {
    checks.push_back({{"name", name}, {"passed", passed}, {"value", value}, {"expected", expected}});
    all = all && passed;
    out.plot.push_back({"passed", static_cast<double>(checks.size() - 1), passed ? 1.0 : 0.0});
  };
  std::uint64_t mismatched = 0;
  for (std::uint64_t q = 1; q <= 60; ++q)
    if (enumerate_characters(q).size() != euler_phi(q)) ++mismatched;
  record("character counts q <= 60", mismatched == 0, static_cast<double>(mismatched), 0.0);
  const double pi = std::numbers::pi;
  const double z2 = riemann_zeta(2.0).real();
  record("zeta(2)", std::abs(z2 - pi * pi / 6.0) < 1e-10, z2, pi * pi / 6.0);
  const double l1 = l_value(1.0, parse_character("4:1")).real();
  record("L(1, 4:1)", std::abs(l1 - pi / 4.0) < 1e-10, l1, pi / 4.0);
  const auto rel = find_rational_relations(parse_shift_list("1,1/2,1/3"));
  record("relation denominator for 1,1/2,1/3", rel.denominator == 6, static_cast<double>(rel.denominator), 6.0);
  const auto target = make_kronecker_target({1.0}, 1, 0.25, 2.0);
  const auto k = measure_kronecker_density(target, 1e5, 100000, 1);
  record("Kronecker density, one prime, delta 0.25", std::abs(k.density - 0.5) < 0.01, k.density, 0.5);
  const auto chi = parse_character("4:1");
  const double g = g_value(123.0, {{1.0, 1.0}, {chi, chi}}, StripRegion{}, {});
  record("degenerate family g", g == 0.0, g, 0.0);
  out.results["checks"] = checks;
  out.results["all_passed"] = all;
  out.status = all ? 0 : 5;
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << content;
}

}  // namespace

Outcome execute(const RunConfig& config) {
  validate(config);
  Outcome inner;
  const auto& cmd = config.command;
  if (cmd == kScan) inner = scan_density(config);
  else if (cmd == kDist) inner = dist_fn(config);
  else if (cmd == kKron) inner = kronecker(config);
  else if (cmd == kFind) inner = find_tau(config);
  else if (cmd == kMean) inner = mean_value(config);
  else if (cmd == kB2) inner = b2(config);
  else if (cmd == kRel) inner = relations(config);
  else inner = selfcheck(config);
  Outcome out = std::move(inner);
  Json results;
  results["command"] = cmd;
  results["parameters"] = config.parameters();
  results["results"] = std::move(out.results);
  out.results = std::move(results);
  return out;
}

Json error_json(const std::exception& e) {
  std::string type = "Error";
  if (dynamic_cast<const ConfigError*>(&e)) type = "ConfigError";
  else if (dynamic_cast<const RangeError*>(&e)) type = "RangeError";
  else if (dynamic_cast<const PoleError*>(&e)) type = "PoleError";
  else if (dynamic_cast<const DomainError*>(&e)) type = "DomainError";
  Json j;
  j["error"] = {{"type", type}, {"message", e.what()}};
  return j;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const PoleError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 3;
  if (dynamic_cast<const RangeError*>(&e)) return 4;
  return 1;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto outcome = execute(config);
    const std::filesystem::path dir = config.text("output-dir");
    std::filesystem::create_directories(dir);
    write_file(dir / "manifest.json", config.manifest().dump(2) + "\n");
    write_file(dir / "results.json", outcome.results.dump(2) + "\n");
    if (!outcome.samples_csv.empty()) write_file(dir / "samples.csv", outcome.samples_csv);
    std::string csv = "series,x,y\n";
    for (const auto& p : outcome.plot) csv += csv_field(p.series) + "," + format_real(p.x) + "," + format_real(p.y) + "\n";
    write_file(dir / "plotdata.csv", csv);
    if (config.text("format") == "json") {
      Json rows = Json::array();
      for (const auto& p : outcome.plot) rows.push_back({{"series", p.series}, {"x", p.x}, {"y", p.y}});
      write_file(dir / "plotdata.json", rows.dump(2) + "\n");
    }
    out << outcome.results.dump(2) << "\n";
    return outcome.status;
  } catch (const std::exception& e) {
    err << error_json(e).dump() << "\n";
    return exit_code(e);
  }
}

}  // namespace selfapprox::cli
