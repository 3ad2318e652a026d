#include "nterm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nterm/asymptotics.hpp"
#include "nterm/oracle.hpp"
#include "nterm/widths.hpp"

namespace nterm::cli {

namespace {

using Json = nlohmann::ordered_json;

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

// ------------------------------------------------------------ descriptors

double parse_number(const std::string& text, const std::string& field) {
  if (text == "inf" || text == "+inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "field '" + field + "': cannot parse '" + text + "' as a number");
  }
}

Index parse_index(const std::string& text, const std::string& field) {
  const double v = parse_number(text, field);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9e15)
    throw ConfigError(field, "field '" + field + "': '" + text + "' is not a nonnegative integer");
  return static_cast<Index>(v);
}

struct Descriptor {
  std::string kind;
  std::vector<std::string> positional;
  std::map<std::string, std::string> fields;

  bool has(const std::string& key) const { return fields.count(key) > 0; }
  double number(const std::string& key, const std::string& field) const {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(field, "field '" + field + "': missing '" + key + "'");
    return parse_number(it->second, field + "." + key);
  }
  double number_or(const std::string& key, double fallback, const std::string& field) const {
    return has(key) ? number(key, field) : fallback;
  }
  void allow(std::initializer_list<const char*> keys, const std::string& field) const {
    for (const auto& [k, v] : fields) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw ConfigError(field, "field '" + field + "': unknown key '" + k + "' for kind '" + kind + "'");
    }
  }
};

Descriptor split_descriptor(const std::string& text, const std::string& field) {
  Descriptor d;
  const auto colon = text.find(':');
  d.kind = text.substr(0, colon);
  std::transform(d.kind.begin(), d.kind.end(), d.kind.begin(), [](unsigned char c) { return std::tolower(c); });
  d.kind.erase(std::remove(d.kind.begin(), d.kind.end(), '_'), d.kind.end());
  if (d.kind.empty()) throw ConfigError(field, "field '" + field + "': empty descriptor");
  if (colon == std::string::npos) return d;
  std::stringstream body(text.substr(colon + 1));
  std::string item;
  while (std::getline(body, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      d.positional.push_back(item);
    else
      d.fields[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return d;
}

WeightFamily family_from(const Descriptor& d, const std::string& field) {
  try {
    if (d.kind == "mixed") {
      d.allow({"s", "r", "d"}, field);
      return WeightFamily::mixed(d.number("s", field), d.number_or("r", kInf, field),
                                 static_cast<int>(d.number_or("d", 1, field)));
    }
    if (d.kind == "energy") {
      d.allow({"s", "d"}, field);
      return WeightFamily::energy(d.number("s", field), static_cast<int>(d.number_or("d", 1, field)));
    }
  } catch (const DomainError& e) {
    throw ConfigError(field, "field '" + field + "': " + e.what());
  }
  throw ConfigError(field, "field '" + field + "': unknown weight family '" + d.kind + "'");
}

Json exponent_json(double v) { return std::isinf(v) ? Json("inf") : Json(v); }

// ------------------------------------------------------------ output

struct Report {
  std::vector<std::string> header;
  Json echo = Json::object();
  Json records = Json::array();
  Json errors = Json::array();
};

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_report(const Report& rep, const std::string& format, std::ostream& out, std::ostream& err) {
  if (format == "csv") {
    for (std::size_t i = 0; i < rep.header.size(); ++i) out << (i ? "," : "") << rep.header[i];
    out << "\n";
    for (const auto& rec : rep.records) {
      if (rec.contains("summary")) continue;
      std::vector<std::string> cells;
      for (const auto& [k, v] : rec.items()) {
        if (v.is_array())
          for (const auto& x : v) cells.push_back(csv_cell(x));
        else
          cells.push_back(csv_cell(v));
      }
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << "\n";
    }
    for (const auto& e : rep.errors) err << e.dump() << "\n";
    return;
  }
  Json doc;
  doc["tool_version"] = kToolVersion;
  doc["config_echo"] = rep.echo;
  doc["records"] = rep.records;
  doc["errors"] = rep.errors;
  out << doc.dump(2) << "\n";
}

std::pair<std::string, int> classify(const std::exception& e) {
  if (const auto* c = dynamic_cast<const ConfigError*>(&e); c) return {"config_error", kConfigError};
  if (dynamic_cast<const VerificationFailure*>(&e)) return {"verification_failure", kVerificationFailure};
  if (dynamic_cast<const DivergenceError*>(&e)) return {"divergence", kDomainError};
  if (dynamic_cast<const ScanBudgetExceeded*>(&e)) return {"scan_budget_exceeded", kDomainError};
  if (dynamic_cast<const ToleranceUnreachable*>(&e)) return {"tolerance_unreachable", kDomainError};
  if (dynamic_cast<const UndecidableError*>(&e)) return {"undecidable", kDomainError};
  if (dynamic_cast<const OverflowError*>(&e)) return {"overflow", kDomainError};
  return {"domain_error", kDomainError};
}

Json error_record(const std::exception& e) {
  Json j;
  j["kind"] = classify(e).first;
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) j["field"] = c->field();
  j["message"] = e.what();
  if (const auto* b = dynamic_cast<const ScanBudgetExceeded*>(&e)) {
    j["partial_lower_bound"] = b->partial_lower_bound();
    j["last_index"] = b->last_index();
  }
  return j;
}

// ------------------------------------------------------------ subcommands

SourcePtr source_of(const JobConfig& cfg) {
  if (cfg.sequence.empty() == cfg.family.empty())
    throw ConfigError("seq", "exactly one of --seq and --family is required");
  SourcePtr src = cfg.sequence.empty() ? rearranged_source(parse_family(cfg.family)) : parse_sequence(cfg.sequence);
  if (cfg.scale != 1.0) {
    if (!(cfg.scale > 0.0) || !std::isfinite(cfg.scale)) throw ConfigError("scale", "--scale must be positive");
    src = make_scaled(src, cfg.scale);
  }
  return src;
}

void echo_source(const JobConfig& cfg, Json& echo) {
  if (!cfg.sequence.empty()) echo["seq"] = cfg.sequence;
  if (!cfg.family.empty()) echo["family"] = cfg.family;
  if (cfg.scale != 1.0) echo["scale"] = cfg.scale;
}

std::vector<Index> grid_of(const JobConfig& cfg, int lo_default, int hi_default) {
  if (!cfg.n.empty()) return cfg.n;
  int lo = lo_default;
  int hi = hi_default;
  int per = 1;
  if (!cfg.grid.empty()) {
    std::stringstream ss(cfg.grid);
    std::string part;
    std::vector<int> parts;
    while (std::getline(ss, part, ':')) parts.push_back(static_cast<int>(parse_index(part, "grid")));
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("grid", "--grid expects lo:hi[:per_decade]");
    lo = parts[0];
    hi = parts[1];
    per = parts.size() == 3 ? parts[2] : 1;
    if (lo > hi || per < 1 || hi > 12) throw ConfigError("grid", "--grid bounds are invalid");
  }
  return geometric_grid(lo, hi, per);
}

void require_pq(const JobConfig& cfg) {
  if (!cfg.have_p) throw ConfigError("p", "--p is required");
  if (!cfg.have_q) throw ConfigError("q", "--q is required");
}

int run_width(const JobConfig& cfg, Report& rep) {
  require_pq(cfg);
  if (cfg.n.empty()) throw ConfigError("n", "--n is required");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol", "--tol must be positive");
  rep.header = {"n", "value_lo", "value_hi", "regime", "achiever"};
  const DiagonalSpec spec{cfg.p, cfg.q, source_of(cfg)};
  echo_source(cfg, rep.echo);
  rep.echo["p"] = exponent_json(cfg.p);
  rep.echo["q"] = exponent_json(cfg.q);
  rep.echo["n"] = cfg.n;
  rep.echo["tol"] = cfg.tol;
  int code = kOk;
  for (Index n : cfg.n) {
    try {
      const WidthResult r = sigma_exact(spec, n, cfg.tol);
      Json rec;
      rec["n"] = n;
      rec["value_lo"] = r.value.lo;
      rec["value_hi"] = r.value.hi;
      rec["regime"] = regime_tag(r.regime);
      rec["achiever"] = r.achiever ? Json(*r.achiever) : Json(nullptr);
      rep.records.push_back(rec);
    } catch (const Error& e) {
      Json j = error_record(e);
      j["n"] = n;
      rep.errors.push_back(j);
      code = std::max(code, static_cast<int>(classify(e).second));
    }
  }
  return code;
}

int run_constant(const JobConfig& cfg, Report& rep) {
  if (cfg.tag.empty()) throw ConfigError("tag", "--tag is required");
  if (cfg.s.empty()) throw ConfigError("s", "--s is required");
  rep.header = {"tag", "s", "d", "lo", "hi"};
  const std::vector<int> dims = cfg.d.empty() ? std::vector<int>{1} : cfg.d;
  rep.echo["tag"] = cfg.tag;
  rep.echo["s"] = cfg.s;
  rep.echo["d"] = dims;
  rep.echo["tol"] = cfg.tol;
  std::string tag = cfg.tag;
  std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char c) { return std::tolower(c); });
  const bool dimensionless = tag == "energy_s" || tag == "predicted";
  if (tag == "predicted") {
    require_pq(cfg);
    rep.echo["p"] = exponent_json(cfg.p);
    rep.echo["q"] = exponent_json(cfg.q);
    rep.echo["beta"] = cfg.beta;
    rep.echo["c"] = cfg.c;
  }
  int code = kOk;
  for (double s : cfg.s) {
    for (int d : dimensionless ? std::vector<int>{0} : dims) {
      Json rec;
      rec["tag"] = cfg.tag;
      rec["s"] = s;
      rec["d"] = dimensionless ? Json(nullptr) : Json(d);
      try {
        CertifiedValue v;
        if (tag == "mixref")
          v = CertifiedValue::exact(mix_reference_constant(s, d));
        else if (tag == "energy_s")
          v = energy_S(s, cfg.tol);
        else if (tag == "energy_constant")
          v = energy_constant(s, d, cfg.tol);
        else if (tag == "predicted")
          v = CertifiedValue::exact(predicted_constant(cfg.p, cfg.q, {s, cfg.beta, cfg.c}));
        else
          v = specialized_constant(parse_tag(cfg.tag), s, d, cfg.tol);
        rec["lo"] = v.lo;
        rec["hi"] = v.hi;
        rep.records.push_back(rec);
      } catch (const DomainError& e) {
        if (std::string(e.what()).rfind("unknown constant tag", 0) == 0) throw ConfigError("tag", e.what());
        Json j = error_record(e);
        j["s"] = s;
        rep.errors.push_back(j);
        code = std::max(code, static_cast<int>(kDomainError));
      } catch (const Error& e) {
        Json j = error_record(e);
        j["s"] = s;
        rep.errors.push_back(j);
        code = std::max(code, static_cast<int>(classify(e).second));
      }
    }
  }
  return code;
}

std::vector<double> random_prefix(Index m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> step(0.2, 1.0);
  std::bernoulli_distribution tie(0.15);
  std::vector<double> lam(static_cast<std::size_t>(m));
  double v = 1.0 + 3.0 * step(rng);
  for (auto& x : lam) {
    x = v;
    if (!tie(rng)) v *= step(rng);
  }
  return lam;
}

constexpr double kDominationSlack = 1e-12;
constexpr double kAttainmentTol = 1e-10;
constexpr double kOptimizerReach = 1e-6;
constexpr double kOptimizerExcess = 1e-9;

bool verify_one(double p, double q, const std::vector<double>& lam, Index n, const JobConfig& cfg, Report& rep) {
  const Index m = static_cast<Index>(lam.size());
  double formula = sigma_finite(p, q, lam, n);
  if (cfg.inject_perturbation) formula *= 1.0 - 1e-3;
  bool all = true;
  auto base = [&](const char* check) {
    Json rec;
    rec["check"] = check;
    rec["p"] = exponent_json(p);
    rec["q"] = exponent_json(q);
    rec["M"] = m;
    rec["n"] = n;
    rec["formula"] = formula;
    return rec;
  };
  {
    double worst = 0.0;
    for (const BallSample& b : sample_ball(m, p, cfg.samples, cfg.seed))
      worst = std::max(worst, best_n_term_error(lam, b.xi, n, q));
    Json rec = base("domination");
    rec["witness"] = worst;
    rec["margin"] = worst - formula;
    rec["pass"] = worst <= formula + kDominationSlack;
    all = all && rec["pass"].get<bool>();
    rep.records.push_back(rec);
  }
  if (p <= q && !std::isinf(p)) {
    double attained = 0.0;
    for (Index k = n + 1; k <= m; ++k)
      attained = std::max(attained, best_n_term_error(lam, extremal_vector(lam, k, p).xi, n, q));
    Json rec = base("attainment");
    rec["witness"] = attained;
    rec["margin"] = std::abs(attained - formula) / formula;
    rec["pass"] = std::abs(attained - formula) <= kAttainmentTol * formula;
    all = all && rec["pass"].get<bool>();
    rep.records.push_back(rec);
  } else if (q < p) {
    const OptimizerResult opt = maximize_small(p, q, lam, n, cfg.restarts, cfg.seed);
    Json rec = base("optimizer");
    rec["witness"] = opt.value;
    rec["margin"] = formula - opt.value;
    rec["pass"] = opt.value >= formula - kOptimizerReach && opt.value <= formula + kOptimizerExcess;
    all = all && rec["pass"].get<bool>();
    rep.records.push_back(rec);
  }
  return all;
}

int run_verify(const JobConfig& cfg, Report& rep) {
  rep.header = {"check", "p", "q", "M", "n", "formula", "witness", "margin", "pass"};
  if (cfg.big_m < 2 || cfg.big_m > 16) throw ConfigError("M", "--M must lie in 2..16");
  if (cfg.samples < 1) throw ConfigError("samples", "--samples must be >= 1");
  if (cfg.restarts < 1) throw ConfigError("restarts", "--restarts must be >= 1");
  rep.echo["M"] = cfg.big_m;
  rep.echo["seed"] = cfg.seed;
  rep.echo["samples"] = cfg.samples;
  rep.echo["restarts"] = cfg.restarts;
  if (cfg.inject_perturbation) rep.echo["inject_perturbation"] = true;
  std::mt19937_64 rng(cfg.seed);
  bool ok = true;
  if (!cfg.have_p && !cfg.have_q) {
    rep.echo["suite"] = "default";
    const Index n = cfg.n.empty() ? 2 : cfg.n.front();
    if (n >= cfg.big_m) throw ConfigError("n", "--n must be below M");
    for (double p : {0.5, 1.0, 2.0, 3.0})
      for (double q : {0.5, 1.0, 2.0, 3.0}) ok = verify_one(p, q, random_prefix(cfg.big_m, rng), n, cfg, rep) && ok;
  } else {
    require_pq(cfg);
    rep.echo["p"] = exponent_json(cfg.p);
    rep.echo["q"] = exponent_json(cfg.q);
    std::vector<double> lam;
    if (!cfg.sequence.empty() || !cfg.family.empty()) {
      echo_source(cfg, rep.echo);
      const SourcePtr src = source_of(cfg);
      for (Index k = 1; k <= cfg.big_m; ++k) lam.push_back(src->term(k));
    } else if (cfg.random_prefix) {
      rep.echo["prefix"] = "random";
      lam = random_prefix(cfg.big_m, rng);
    } else {
      rep.echo["prefix"] = "2^-k";
      for (Index k = 1; k <= cfg.big_m; ++k) lam.push_back(std::ldexp(1.0, static_cast<int>(-k)));
    }
    const std::vector<Index> ns = cfg.n.empty() ? std::vector<Index>{1} : cfg.n;
    for (Index n : ns) {
      if (n >= cfg.big_m) throw ConfigError("n", "--n must be below M");
      ok = verify_one(cfg.p, cfg.q, lam, n, cfg, rep) && ok;
    }
  }
  if (!ok) {
    rep.errors.push_back(error_record(VerificationFailure("at least one verification check failed")));
    return kVerificationFailure;
  }
  return kOk;
}

int run_stream(const JobConfig& cfg, Report& rep) {
  if (cfg.family.empty()) throw ConfigError("family", "--family is required");
  if (cfg.count < 1) throw ConfigError("count", "--count must be >= 1");
  const WeightFamily family = parse_family(cfg.family);
  rep.header = {"n"};
  for (int i = 1; i <= family.dimension(); ++i) rep.header.push_back("k_" + std::to_string(i));
  rep.header.push_back("weight");
  RearrangementStream stream(family);
  rep.echo["family"] = cfg.family;
  rep.echo["count"] = cfg.count;
  for (Index i = 1; i <= cfg.count; ++i) {
    const auto e = stream.next();
    Json rec;
    rec["n"] = i;
    rec["k"] = e.point;
    rec["weight"] = e.weight;
    rep.records.push_back(rec);
  }
  return kOk;
}

int run_ratio(const JobConfig& cfg, Report& rep) {
  rep.header = {"n", "observed", "predicted", "gap"};
  if (cfg.s.size() != 1) throw ConfigError("s", "--s takes exactly one value for ratio");
  const SourcePtr src = source_of(cfg);
  const std::vector<Index> grid = grid_of(cfg, 2, 6);
  const AsymptoticProfile profile{cfg.s.front(), cfg.beta, cfg.c};
  echo_source(cfg, rep.echo);
  rep.echo["mode"] = cfg.terms ? "terms" : "width";
  rep.echo["s"] = profile.s;
  rep.echo["beta"] = profile.beta;
  rep.echo["c"] = profile.c;
  rep.echo["grid"] = grid;
  RatioDiagnostics diag;
  if (cfg.terms) {
    diag = term_ratio(*src, profile, grid);
  } else {
    require_pq(cfg);
    rep.echo["p"] = exponent_json(cfg.p);
    rep.echo["q"] = exponent_json(cfg.q);
    rep.echo["tol"] = cfg.tol;
    diag = empirical_ratio(DiagonalSpec{cfg.p, cfg.q, src}, profile, grid, cfg.tol);
  }
  for (std::size_t i = 0; i < diag.grid.size(); ++i) {
    Json rec;
    rec["n"] = diag.grid[i];
    rec["observed"] = diag.observed[i];
    rec["predicted"] = diag.predicted;
    rec["gap"] = diag.gap[i];
    rep.records.push_back(rec);
  }
  Json summary;
  summary["trend"] = diag.trend;
  summary["final_gap"] = diag.final_gap;
  summary["last_quartile_mean"] = diag.last_quartile_mean;
  summary["slope_sign"] = diag.slope_sign;
  rep.records.push_back(Json{{"summary", summary}});
  return kOk;
}

}  // namespace

double parse_exponent(const std::string& text, const std::string& field) {
  const double v = parse_number(text, field);
  if (!(v > 0.0)) throw ConfigError(field, "field '" + field + "': exponent must be positive or inf");
  return v;
}

SourcePtr parse_sequence(const std::string& descriptor) {
  const std::string field = "seq";
  const Descriptor d = split_descriptor(descriptor, field);
  try {
    if (d.kind == "geometric") {
      d.allow({"ratio", "c"}, field);
      double ratio = d.has("ratio") ? d.number("ratio", field) : 0.0;
      if (!d.positional.empty()) ratio = parse_number(d.positional.front(), field + ".ratio");
      if (!d.has("ratio") && d.positional.empty()) throw ConfigError(field, "field 'seq': geometric needs a ratio");
      return make_geometric(ratio, d.number_or("c", 1.0, field));
    }
    if (d.kind == "powerlog") {
      d.allow({"s", "b", "beta", "c"}, field);
      const double beta = d.has("beta") ? d.number("beta", field) : d.number_or("b", 0.0, field);
      return make_power_log(d.number("s", field), beta, d.number_or("c", 1.0, field));
    }
    if (d.kind == "finite") {
      d.allow({"values", "tail"}, field);
      if (!d.has("values")) throw ConfigError(field, "field 'seq': finite needs values=a/b/c");
      std::vector<double> values;
      std::stringstream ss(d.fields.at("values"));
      std::string part;
      while (std::getline(ss, part, '/')) values.push_back(parse_number(part, field + ".values"));
      const double tail = d.has("tail") ? d.number("tail", field) : (values.empty() ? 1.0 : values.back());
      return make_finite(std::move(values), tail);
    }
    if (d.kind == "mixed" || d.kind == "energy" || d.kind == "lattice") {
      if (d.kind == "lattice") {
        if (d.positional.empty()) throw ConfigError(field, "field 'seq': lattice needs a family kind");
        Descriptor inner = d;
        inner.kind = d.positional.front();
        return rearranged_source(family_from(inner, field));
      }
      return rearranged_source(family_from(d, field));
    }
  } catch (const DomainError& e) {
    throw ConfigError(field, "field 'seq': " + std::string(e.what()));
  }
  throw ConfigError(field, "field 'seq': unknown sequence kind '" + d.kind + "'");
}

WeightFamily parse_family(const std::string& descriptor) {
  return family_from(split_descriptor(descriptor, "family"), "family");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Best n-term widths of diagonal operators and lattice rearrangements", "nterm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  JobConfig cfg;
  std::string p_text;
  std::string q_text;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto source_opts = [&](CLI::App* sub) {
    sub->add_option("--seq", cfg.sequence, "sequence descriptor, e.g. geometric:0.5");
    sub->add_option("--family", cfg.family, "weight family descriptor, e.g. mixed:s=1,r=inf,d=2");
    sub->add_option("--scale", cfg.scale, "multiply the sequence by a positive constant");
  };
  auto pq_opts = [&](CLI::App* sub) {
    sub->add_option("--p", p_text, "source exponent (decimal or inf)");
    sub->add_option("--q", q_text, "target exponent (decimal or inf)");
  };

  CLI::App* width = app.add_subcommand("width", "exact width sigma_n");
  source_opts(width);
  pq_opts(width);
  width->add_option("--n", cfg.n, "term counts")->delimiter(',');
  width->add_option("--tol", cfg.tol, "relative tolerance of enclosures");
  common(width);

  CLI::App* constant = app.add_subcommand("constant", "asymptotic constants");
  constant->add_option("--tag", cfg.tag,
                       "H_L2, H_A, A_L2, A_A, H_H1, A_H1, mixref, energy_S, energy_constant or predicted");
  constant->add_option("--s", cfg.s, "smoothness values")->delimiter(',');
  constant->add_option("--d", cfg.d, "dimensions")->delimiter(',');
  constant->add_option("--beta", cfg.beta, "log exponent (predicted)");
  constant->add_option("--c", cfg.c, "leading constant (predicted)");
  constant->add_option("--tol", cfg.tol, "relative tolerance");
  pq_opts(constant);
  common(constant);

  CLI::App* verify = app.add_subcommand("verify", "check closed forms against the oracles");
  pq_opts(verify);
  source_opts(verify);
  verify->add_option("--M", cfg.big_m, "truncation length (<= 16)");
  verify->add_option("--n", cfg.n, "term counts")->delimiter(',');
  verify->add_option("--seed", cfg.seed, "random seed");
  verify->add_option("--samples", cfg.samples, "ball samples per configuration");
  verify->add_option("--restarts", cfg.restarts, "optimizer restarts");
  verify->add_flag("--random-prefix", cfg.random_prefix, "use a random non-increasing prefix");
  verify->add_flag("--inject-perturbation", cfg.inject_perturbation, "test mode: perturb the closed form");
  common(verify);

  CLI::App* stream = app.add_subcommand("stream", "lattice points by increasing weight");
  stream->add_option("--family", cfg.family, "weight family descriptor");
  stream->add_option("--count", cfg.count, "number of points");
  common(stream);

  CLI::App* ratio = app.add_subcommand("ratio", "convergence of normalized widths or terms");
  source_opts(ratio);
  pq_opts(ratio);
  ratio->add_option("--s", cfg.s, "profile decay exponent")->delimiter(',');
  ratio->add_option("--beta", cfg.beta, "profile log exponent");
  ratio->add_option("--c", cfg.c, "profile constant");
  ratio->add_option("--n", cfg.n, "explicit grid")->delimiter(',');
  ratio->add_option("--grid", cfg.grid, "decimal exponents lo:hi[:per_decade]");
  ratio->add_option("--tol", cfg.tol, "relative tolerance");
  ratio->add_flag("--terms", cfg.terms, "normalize the terms instead of the widths");
  common(ratio);

  Report rep;
  std::vector<const char*> argv{"nterm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    rep.errors.push_back(Json{{"kind", "config_error"}, {"message", e.what()}});
    write_report(rep, "json", err, err);
    return kConfigError;
  }

  for (CLI::App* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  rep.echo["subcommand"] = cfg.subcommand;
  int code = kOk;
  try {
    if (!p_text.empty()) {
      cfg.p = parse_exponent(p_text, "p");
      cfg.have_p = true;
    }
    if (!q_text.empty()) {
      cfg.q = parse_exponent(q_text, "q");
      cfg.have_q = true;
    }
    if (cfg.subcommand == "width")
      code = run_width(cfg, rep);
    else if (cfg.subcommand == "constant")
      code = run_constant(cfg, rep);
    else if (cfg.subcommand == "verify")
      code = run_verify(cfg, rep);
    else if (cfg.subcommand == "stream")
      code = run_stream(cfg, rep);
    else
      code = run_ratio(cfg, rep);
  } catch (const std::exception& e) {
    rep.errors.push_back(error_record(e));
    code = classify(e).second;
  }
  write_report(rep, cfg.format, out, err);
  return code;
}

}  // namespace nterm::cli
