#include "blockade/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "blockade/budget.hpp"
#include "blockade/errors.hpp"
#include "blockade/growth.hpp"
#include "blockade/protocol.hpp"

namespace blockade::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { kReal, kInteger, kText, kFlag };

struct ParamSpec {
  std::string name;
  Kind kind;
  std::string default_value;  // empty: unset
  std::string help;
};

using Params = std::map<std::string, std::string>;

enum class Command { kEntangle, kGhz, kBudget, kGrow };

const char* command_name(Command c) {
  switch (c) {
    case Command::kEntangle: return "entangle";
    case Command::kGhz: return "ghz";
    case Command::kBudget: return "budget";
    case Command::kGrow: return "grow";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (auto c : {Command::kEntangle, Command::kGhz, Command::kBudget, Command::kGrow})
    if (name == command_name(c)) return c;
  return std::nullopt;
}

std::string dashed(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

std::string real_text(double v) { return Json(v).dump(); }

const std::vector<ParamSpec>& schema(Command c) {
  static const std::vector<ParamSpec> entangle = {
      {"eta", Kind::kReal, "1", "combined source and detection efficiency"},
      {"p-abs", Kind::kReal, "1", "blockaded absorption probability"},
      {"dark-count-rate", Kind::kReal, "0", "detector dark-count rate (Hz)"},
      {"gate-time", Kind::kReal, "5e-06", "detection gate (s)"},
      {"policy", Kind::kText, "marginal", "herald policy: marginal | exclusive"},
      {"trials", Kind::kInteger, "0", "Monte Carlo trials (0: exact only)"},
  };
  static const std::vector<ParamSpec> ghz = {
      {"qubits", Kind::kInteger, "4", "GHZ size Q (even, >= 4)"},
      {"eta", Kind::kReal, "1", "combined source and detection efficiency"},
      {"p-abs", Kind::kReal, "1", "blockaded absorption probability (Q = 4 only)"},
      {"dark-count-rate", Kind::kReal, "0", "detector dark-count rate (Hz, Q = 4 only)"},
      {"gate-time", Kind::kReal, "5e-06", "detection gate (s)"},
  };
  static const std::vector<ParamSpec> budget = [] {
    std::vector<ParamSpec> v = {{"preset", Kind::kText, "paper-43d", "base parameter set"}};
    for (const auto& f : budget::budget_fields()) {
      v.push_back({dashed(f.name), Kind::kReal, "", std::string("override (") + f.unit + ")"});
    }
    return v;
  }();
  static const std::vector<ParamSpec> grow = {
      {"block-size", Kind::kInteger, "4", "GHZ block size Q"},
      {"target", Kind::kInteger, "8", "target cluster size"},
      {"pairing", Kind::kText, "largest-first", "largest-first | smallest-first | random"},
      {"pool-size", Kind::kInteger, "2", "clusters held before linking"},
      {"step-cap", Kind::kInteger, "1000000", "per-trial step cap"},
      {"eta", Kind::kReal, "1", "efficiency for block generation"},
      {"eta-prime", Kind::kReal, "", "efficiency for linking (default: eta)"},
      {"trials", Kind::kInteger, "10000", "Monte Carlo trials"},
      {"exact", Kind::kFlag, "false", "also solve the absorbing chain"},
      {"max-states", Kind::kInteger, "20000", "state bound for the chain solve"},
  };
  switch (c) {
    case Command::kEntangle: return entangle;
    case Command::kGhz: return ghz;
    case Command::kBudget: return budget;
    case Command::kGrow: return grow;
  }
  throw std::logic_error("unknown command");
}

const ParamSpec* find_spec(Command c, const std::string& name) {
  for (const auto& s : schema(c))
    if (s.name == name) return &s;
  return nullptr;
}

Params defaults(Command c) {
  Params p;
  for (const auto& s : schema(c)) p[s.name] = s.default_value;
  return p;
}

// ---------------------------------------------------------------- parsing

double parse_real(const std::string& name, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("'" + name + "': expected a number, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& name, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ConfigError("'" + name + "': expected an integer, got '" + text + "'");
  return v;
}

bool parse_flag(const std::string& name, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError("'" + name + "': expected true or false, got '" + text + "'");
}

double real(const Params& p, const std::string& name) { return parse_real(name, p.at(name)); }
long long integer(const Params& p, const std::string& name) { return parse_integer(name, p.at(name)); }

std::uint64_t count(const Params& p, const std::string& name) {
  const long long v = integer(p, name);
  if (v < 0) throw ParameterError("'" + name + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

int small_int(const Params& p, const std::string& name) {
  const long long v = integer(p, name);
  if (v < 0 || v > 1'000'000) throw ParameterError("'" + name + "' out of range");
  return static_cast<int>(v);
}

// Validates every value against its declared kind.
void check_kinds(Command c, const Params& p) {
  for (const auto& s : schema(c)) {
    const std::string& v = p.at(s.name);
    if (v.empty()) continue;
    if (s.kind == Kind::kReal) parse_real(s.name, v);
    if (s.kind == Kind::kInteger) parse_integer(s.name, v);
    if (s.kind == Kind::kFlag) parse_flag(s.name, v);
  }
}

Json typed(Command c, const Params& p) {
  Json j = Json::object();
  for (const auto& s : schema(c)) {
    const std::string& v = p.at(s.name);
    if (v.empty()) {
      j[s.name] = nullptr;
    } else if (s.kind == Kind::kReal) {
      j[s.name] = parse_real(s.name, v);
    } else if (s.kind == Kind::kInteger) {
      j[s.name] = parse_integer(s.name, v);
    } else if (s.kind == Kind::kFlag) {
      j[s.name] = parse_flag(s.name, v);
    } else {
      j[s.name] = v;
    }
  }
  return j;
}

// ----------------------------------------------------------- evaluation

struct Evaluation {
  Json results = Json::object();  // flat scalars, stable keys
  Json details = Json::object();  // extra JSON-only content
  bool cap_hit = false;
  std::string text;               // replaces the generic text layout when set
};

optics::DetectorModel detector_from(const Params& p) {
  optics::DetectorModel det;
  det.efficiency = real(p, "eta");
  det.dark_count_rate = real(p, "dark-count-rate");
  det.gate_time = real(p, "gate-time");
  det.validate();
  return det;
}

Json or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Evaluation eval_entangle(const Params& p, std::uint64_t seed) {
  using namespace protocol;
  const auto det = detector_from(p);
  const ensemble::AbsorptionModel absorption{real(p, "p-abs")};
  absorption.validate();
  HeraldPolicy policy;
  if (p.at("policy") == "marginal") {
    policy = HeraldPolicy::kMarginal;
  } else if (p.at("policy") == "exclusive") {
    policy = HeraldPolicy::kExclusive;
  } else {
    throw ParameterError("unknown herald policy '" + p.at("policy") + "'");
  }
  const auto trials = count(p, "trials");

  const auto exact = entangle_pair_exact(absorption, det, policy);
  Evaluation e;
  std::optional<double> fid_up, fid_down, fid;
  double p_up = 0.0, p_down = 0.0;
  if (const auto& b = exact.branch(Detector::kUp)) p_up = b->probability, fid_up = b->fidelity;
  if (const auto& b = exact.branch(Detector::kDown)) p_down = b->probability, fid_down = b->fidelity;
  if (p_up + p_down > 0.0) {
    fid = (p_up * fid_up.value_or(0.0) + p_down * fid_down.value_or(0.0)) / (p_up + p_down);
  }
  const double eps = 1.0 - absorption.p_abs;
  e.results["success_probability"] = exact.success_probability;
  e.results["p_up"] = p_up;
  e.results["p_down"] = p_down;
  e.results["fidelity_up"] = or_null(fid_up);
  e.results["fidelity_down"] = or_null(fid_down);
  e.results["fidelity"] = or_null(fid);
  e.results["first_order_fidelity"] =
      eps <= 0.5 ? Json(budget::fidelity_estimate(eps)) : Json(nullptr);
  if (trials > 0) {
    const auto s = entangle_pair_sampled(absorption, det, seed, trials, policy);
    e.results["sampled_trials"] = s.trials;
    e.results["heralded"] = s.heralded;
    e.results["herald_rate"] = s.herald_rate();
    e.results["herald_rate_sigma"] = std::sqrt(s.herald_rate() * (1 - s.herald_rate()) / double(s.trials));
    e.results["up_fraction"] = s.up_fraction();
    e.results["double_clicks"] = s.double_clicks;
  }
  return e;
}

std::string pattern_name(const optics::HeraldPattern& pattern) {
  std::string name;
  for (std::size_t k = 0; k < pattern.counts.size(); ++k) {
    if (!pattern.clicked(k)) continue;
    if (!name.empty()) name += "+";
    name += "D" + std::to_string(k + 1);
  }
  return name.empty() ? "none" : name;
}

Evaluation eval_ghz(const Params& p, std::uint64_t) {
  const int qubits = small_int(p, "qubits");
  const double eta = real(p, "eta");
  Evaluation e;
  const double formula = protocol::ghz_success_probability(qubits, eta);
  e.results["formula_probability"] = formula;
  if (qubits != 4) {
    if (real(p, "p-abs") != 1.0 || real(p, "dark-count-rate") != 0.0)
      throw ParameterError("state-level GHZ simulation is available for 4 qubits only");
    e.results["success_probability"] = formula;
    e.results["fidelity"] = nullptr;
    e.results["min_pattern_fidelity"] = nullptr;
    return e;
  }
  const auto det = detector_from(p);
  const ensemble::AbsorptionModel absorption{real(p, "p-abs")};
  absorption.validate();
  const auto out = protocol::ghz4_exact(absorption, det);
  e.results["success_probability"] = out.success_probability;
  e.results["fidelity"] =
      out.conditional_state ? Json(fidelity(*out.conditional_state, protocol::ghz_target())) : Json(nullptr);
  std::optional<double> min_fid;
  Json patterns = Json::array();
  for (const auto& a : out.accepted) {
    if (a.probability > 0.0) min_fid = std::min(min_fid.value_or(1.0), a.fidelity);
    Json x_on = Json::array();
    for (auto k : a.correction.x_on) x_on.push_back(protocol::ghz_layout()[k].name);
    patterns.push_back(Json{{"pattern", pattern_name(a.pattern)},
                            {"probability", a.probability},
                            {"fidelity", a.probability > 0.0 ? Json(a.fidelity) : Json(nullptr)},
                            {"correction", Json{{"x_on", x_on}, {"phase_on_A", a.correction.phase_on_a}}}});
  }
  e.results["min_pattern_fidelity"] = or_null(min_fid);
  e.details["accepted_patterns"] = patterns;
  return e;
}

Evaluation eval_budget(const Params& p, std::uint64_t) {
  budget::BudgetParams params = budget::preset(p.at("preset"));
  for (const auto& f : budget::budget_fields()) {
    const std::string key = dashed(f.name);
    if (!p.at(key).empty()) params.*f.member = real(p, key);
  }
  const auto report = budget::budget_report(params);
  Evaluation e;
  for (const auto& q : report.derived) e.results["derived." + q.name] = q.value;
  for (const auto& q : report.mechanisms) e.results["mechanism." + q.name] = q.value;
  for (const auto& q : report.constants) e.results["constant." + q.name] = q.value;
  e.results["dominant_error"] = report.dominant_error;
  e.results["fidelity_estimate"] = report.fidelity;
  e.details["report"] = Json::parse(budget::to_json(report).dump());
  e.text = budget::to_text(report);
  return e;
}

Evaluation eval_grow(const Params& p, std::uint64_t seed) {
  growth::GrowthPolicy policy;
  policy.block_size = small_int(p, "block-size");
  policy.target_size = small_int(p, "target");
  policy.pairing = growth::parse_pairing_rule(p.at("pairing"));
  policy.pool_size = small_int(p, "pool-size");
  policy.step_cap = count(p, "step-cap");
  policy.validate();
  const double eta = real(p, "eta");
  const double eta_prime = p.at("eta-prime").empty() ? eta : real(p, "eta-prime");
  const auto trials = count(p, "trials");

  const auto s = growth::simulate_growth(policy, eta, eta_prime, seed, trials);
  Evaluation e;
  e.cap_hit = s.cap_hits > 0;
  e.results["eta_prime_used"] = eta_prime;
  e.results["trials_run"] = s.trials;
  e.results["successes"] = s.successes;
  e.results["success_fraction"] = s.success_fraction();
  e.results["cap_hits"] = s.cap_hits;
  const std::pair<const char*, const growth::Moments*> moments[] = {
      {"blocks", &s.blocks},
      {"generation_attempts", &s.generation_attempts},
      {"link_attempts", &s.link_attempts},
      {"steps", &s.steps},
  };
  for (const auto& [name, m] : moments) {
    e.results[std::string(name) + "_mean"] = m->mean;
    e.results[std::string(name) + "_stddev"] = m->stddev;
  }
  e.results["accounting_ok"] = s.accounting_ok;
  if (parse_flag("exact", p.at("exact"))) {
    const auto chain = growth::expected_cost_markov(policy, eta, eta_prime, count(p, "max-states"));
    e.results["chain_blocks"] = chain.blocks;
    e.results["chain_generation_attempts"] = chain.generation_attempts;
    e.results["chain_link_attempts"] = chain.link_attempts;
    e.results["chain_steps"] = chain.steps;
    e.results["chain_states"] = chain.transient_states;
  }
  return e;
}

Evaluation evaluate(Command c, const Params& p, std::uint64_t seed) {
  check_kinds(c, p);
  switch (c) {
    case Command::kEntangle: return eval_entangle(p, seed);
    case Command::kGhz: return eval_ghz(p, seed);
    case Command::kBudget: return eval_budget(p, seed);
    case Command::kGrow: return eval_grow(p, seed);
  }
  throw std::logic_error("unknown command");
}

// ------------------------------------------------------------------ sweep

struct Range {
  std::string name;
  std::vector<std::string> values;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError(std::string(what) + " '" + text + "' is not name=value");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

// name=start:stop:step (inclusive) or name=v1,v2,...
Range parse_range(const std::string& text) {
  auto [name, spec] = split_assignment(text, "range");
  Range r{name, {}};
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(trim(part));
    if (parts.size() != 3) throw ConfigError("range '" + text + "' must be start:stop:step");
    const double start = parse_real(name, parts[0]);
    const double stop = parse_real(name, parts[1]);
    const double step = parse_real(name, parts[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError("range '" + text + "' is empty");
    const double span = (stop - start) / step;
    if (span > 1e7) throw ConfigError("range '" + text + "' is too large");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    for (std::size_t k = 0; k < n; ++k) {
      // Round to 12 significant digits so 0.1 + 2 * 0.1 prints as 0.3.
      std::ostringstream v;
      v << std::setprecision(12) << start + double(k) * step;
      r.values.push_back(real_text(std::stod(v.str())));
    }
  } else {
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) {
      part = trim(part);
      if (!part.empty()) r.values.push_back(part);
    }
  }
  if (r.values.empty()) throw ConfigError("range '" + text + "' is empty");
  return r;
}

// --------------------------------------------------------------- output

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (!v.is_string()) return v.dump();
  const std::string s = v.get<std::string>();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return quoted + "\"";
}

std::string text_cell(const Json& v) {
  if (v.is_null()) return "-";
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string render_table(const std::vector<std::string>& columns, const std::vector<Json>& rows,
                         bool csv) {
  std::ostringstream os;
  if (csv) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << csv_cell(row.at(columns[c]));
      os << "\n";
    }
    return os.str();
  }
  std::vector<std::size_t> width(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    width[c] = columns[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], text_cell(row.at(columns[c])).size());
  }
  for (std::size_t c = 0; c < columns.size(); ++c)
    os << std::left << std::setw(int(width[c] + 2)) << columns[c];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      os << std::left << std::setw(int(width[c] + 2)) << text_cell(row.at(columns[c]));
    os << "\n";
  }
  return os.str();
}

std::string render_pairs(const Json& sections) {
  std::ostringstream os;
  for (const auto& [section, values] : sections.items()) {
    for (const auto& [key, value] : values.items()) {
      os << std::left << std::setw(36) << (section + "." + key) << " " << text_cell(value) << "\n";
    }
  }
  return os.str();
}

fs::path resolve_output(const std::string& output) {
  fs::path path(output);
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) path = fs::path(dir) / path.filename();
  return path;
}

void write_atomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  fs::rename(tmp, path);
}

// ------------------------------------------------------------ config file

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
    entries.push_back(split_assignment(line, "config line"));
    if (entries.back().first.empty()) throw ConfigError(path + ":" + std::to_string(number) + ": empty key");
  }
  return entries;
}

CLI::Option* find_option(CLI::App& sub, const std::string& key) {
  if (auto* opt = sub.get_option_no_throw("--" + key)) return opt;
  // Positionals are addressed by their bare name.
  auto* opt = sub.get_option_no_throw(key);
  return opt && opt->get_positional() ? opt : nullptr;
}

// Config values fill options not given on the command line.
void apply_config(CLI::App& sub, const std::string& path) {
  const auto entries = read_config(path);
  std::map<std::string, std::vector<std::string>> grouped;
  std::vector<std::string> order;
  for (const auto& [key, value] : entries) {
    if (key == "config") throw ConfigError("config files cannot include other config files");
    if (!find_option(sub, key)) throw ConfigError("unknown config key '" + key + "'");
    if (!grouped.count(key)) order.push_back(key);
    grouped[key].push_back(value);
  }
  for (const auto& key : order) {
    CLI::Option* opt = find_option(sub, key);
    if (opt->count() > 0) continue;
    if (grouped[key].size() > 1 && opt->get_expected_max() <= 1)
      throw ConfigError("config key '" + key + "' given more than once");
    for (const auto& v : grouped[key]) opt->add_result(v);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

// ----------------------------------------------------------------- driver

struct Common {
  std::uint64_t seed = 1;
  std::string output;
  std::string format = "json";
  std::string config;
};

void add_common(CLI::App& sub, Common& common) {
  sub.add_option("--seed", common.seed, "master seed")->capture_default_str();
  sub.add_option("--output", common.output, "output file (default: standard output)");
  sub.add_option("--format", common.format, "csv | json | text")->capture_default_str();
  sub.add_option("--config", common.config, "key = value file mirroring the long flags");
}

void add_params(CLI::App& sub, Command c, Params& values, std::map<std::string, bool>& flags) {
  for (const auto& s : schema(c)) {
    values[s.name] = s.default_value;
    if (s.kind == Kind::kFlag) {
      flags[s.name] = parse_flag(s.name, s.default_value);
      sub.add_flag("--" + s.name, flags[s.name], s.help);
    } else {
      auto* opt = sub.add_option("--" + s.name, values[s.name], s.help);
      if (!s.default_value.empty()) opt->capture_default_str();
    }
  }
}

std::string emit_single(Command c, const Params& params, const Common& common, const Evaluation& e) {
  const Json typed_params = typed(c, params);
  if (common.format == "json") {
    Json doc{{"schema_version", kSchemaVersion},
             {"command", command_name(c)},
             {"seed", common.seed},
             {"parameters", typed_params},
             {"results", e.results}};
    for (const auto& [k, v] : e.details.items()) doc[k] = v;
    return doc.dump(2) + "\n";
  }
  if (common.format == "csv") {
    std::vector<std::string> columns;
    Json row = Json::object();
    for (const auto& [k, v] : typed_params.items()) columns.push_back(k), row[k] = v;
    for (const auto& [k, v] : e.results.items()) columns.push_back(k), row[k] = v;
    return render_table(columns, {row}, true);
  }
  if (!e.text.empty()) return e.text;
  return render_pairs(Json{{"parameter", typed_params}, {"result", e.results}});
}

struct SweepSpec {
  std::string kind;
  std::vector<std::string> ranges;
  std::vector<std::string> sets;
  std::size_t max_points = kDefaultMaxGridPoints;
};

std::pair<std::string, bool> run_sweep(const SweepSpec& spec, const Common& common) {
  if (spec.kind.empty()) throw ConfigError("sweep: the command to sweep is required");
  const auto command = parse_command(spec.kind);
  if (!command) throw ConfigError("sweep: unknown command '" + spec.kind + "'");
  if (spec.ranges.empty()) throw ConfigError("sweep: at least one --range is required");
  if (spec.ranges.size() > 2) throw ConfigError("sweep: at most two parameters can be swept");

  Params base = defaults(*command);
  Json fixed = Json::object();
  for (const auto& s : spec.sets) {
    auto [name, value] = split_assignment(s, "set");
    if (!find_spec(*command, name)) throw ConfigError("sweep: unknown parameter '" + name + "'");
    base[name] = value;
    fixed[name] = value;
  }
  std::vector<Range> ranges;
  std::size_t points = 1;
  for (const auto& text : spec.ranges) {
    Range r = parse_range(text);
    const auto* ps = find_spec(*command, r.name);
    if (!ps) throw ConfigError("sweep: unknown parameter '" + r.name + "'");
    if (ps->kind != Kind::kReal && ps->kind != Kind::kInteger)
      throw ConfigError("sweep: parameter '" + r.name + "' is not numeric");
    if (fixed.contains(r.name)) throw ConfigError("sweep: '" + r.name + "' is both set and swept");
    for (const auto& other : ranges)
      if (other.name == r.name) throw ConfigError("sweep: '" + r.name + "' swept twice");
    for (auto& v : r.values) {
      const double x = parse_real(r.name, v);
      if (ps->kind == Kind::kInteger) {
        if (x != std::floor(x) || std::abs(x) > 9e15)
          throw ConfigError("sweep: '" + r.name + "' takes integers, got '" + v + "'");
        v = std::to_string(static_cast<long long>(x));
      }
    }
    points *= r.values.size();
    if (points > spec.max_points)
      throw ConfigError("sweep: grid has more than " + std::to_string(spec.max_points) + " points");
    ranges.push_back(std::move(r));
  }
  check_kinds(*command, base);

  std::vector<Json> rows;
  std::vector<std::string> columns;
  bool cap_hit = false;
  const std::size_t inner = ranges.size() == 2 ? ranges[1].values.size() : 1;
  for (std::size_t k = 0; k < points; ++k) {
    Params p = base;
    Json row = Json::object();
    const std::size_t idx[2] = {k / inner, k % inner};
    for (std::size_t r = 0; r < ranges.size(); ++r) {
      p[ranges[r].name] = ranges[r].values[idx[r]];
      row[ranges[r].name] = typed(*command, p)[ranges[r].name];
    }
    const Evaluation e = evaluate(*command, p, common.seed);
    cap_hit = cap_hit || e.cap_hit;
    for (const auto& [key, value] : e.results.items()) row[key] = value;
    if (columns.empty()) {
      for (const auto& [key, value] : row.items()) columns.push_back(key);
    }
    rows.push_back(std::move(row));
  }

  if (common.format == "json") {
    Json swept = Json::array();
    for (const auto& r : ranges) swept.push_back(Json{{"name", r.name}, {"points", r.values.size()}});
    Json doc{{"schema_version", kSchemaVersion},
             {"command", "sweep"},
             {"kind", spec.kind},
             {"seed", common.seed},
             {"parameters", typed(*command, base)},
             {"swept", swept},
             {"columns", columns},
             {"rows", rows}};
    return {doc.dump(2) + "\n", cap_hit};
  }
  return {render_table(columns, rows, common.format == "csv"), cap_hit};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heralded blockade-entanglement simulator", "blockade"};
  app.require_subcommand(1);

  Common common;
  std::map<Command, Params> values;
  std::map<Command, std::map<std::string, bool>> flags;
  std::map<Command, CLI::App*> subs;
  const std::pair<Command, const char*> commands[] = {
      {Command::kEntangle, "exact and sampled pair entangler"},
      {Command::kGhz, "four-ensemble GHZ interferometer and Q-qubit formula"},
      {Command::kBudget, "experimental error budget"},
      {Command::kGrow, "cluster-growth Monte Carlo"},
  };
  for (const auto& [c, help] : commands) {
    CLI::App* sub = app.add_subcommand(command_name(c), help);
    add_params(*sub, c, values[c], flags[c]);
    add_common(*sub, common);
    subs[c] = sub;
  }
  SweepSpec sweep;
  CLI::App* sweep_sub = app.add_subcommand("sweep", "grid over one or two parameters of another command");
  sweep_sub->add_option("kind", sweep.kind, "entangle | ghz | budget | grow");
  sweep_sub->add_option("--range", sweep.ranges, "name=start:stop:step or name=v1,v2,...");
  sweep_sub->add_option("--set", sweep.sets, "name=value for a fixed parameter");
  sweep_sub->add_option("--max-points", sweep.max_points, "grid size bound")->capture_default_str();
  add_common(*sweep_sub, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    CLI::App* active = nullptr;
    std::optional<Command> command;
    for (const auto& [c, sub] : subs)
      if (sub->parsed()) active = sub, command = c;
    if (!active) active = sweep_sub;
    if (!common.config.empty()) apply_config(*active, common.config);
    if (common.format != "json" && common.format != "csv" && common.format != "text")
      throw ConfigError("unknown format '" + common.format + "'");

    std::string content;
    bool cap_hit = false;
    if (command) {
      Params params = values[*command];
      for (const auto& [name, on] : flags[*command]) params[name] = on ? "true" : "false";
      const Evaluation e = evaluate(*command, params, common.seed);
      content = emit_single(*command, params, common, e);
      cap_hit = e.cap_hit;
    } else {
      std::tie(content, cap_hit) = run_sweep(sweep, common);
    }

    if (common.output.empty()) {
      out << content;
    } else {
      write_atomically(resolve_output(common.output), content);
    }
    if (cap_hit) {
      err << "warning: some trials hit the step cap\n";
      return kCapHit;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const std::out_of_range& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const std::domain_error& e) {
    err << "parameter error: " << e.what() << "\n";
    return kParameterError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace blockade::cli
