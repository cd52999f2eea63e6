// copulacov: command-line front end.
//
// Exit codes: 0 pass / certified, 2 finding (violation), 1 usage or internal error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "copulacov/certification.hpp"
#include "copulacov/copula_model.hpp"
#include "copulacov/empirical.hpp"
#include "copulacov/error.hpp"
#include "copulacov/functionals.hpp"
#include "copulacov/montecarlo.hpp"
#include "copulacov/pair_sample.hpp"

namespace {

using namespace copulacov;
using Entries = std::vector<std::pair<std::string, std::string>>;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFinding = 2;

// nlohmann prints the shortest round-trip form; we want fixed 17 digits.
void dump(std::ostream& out, const json& j, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close(static_cast<std::size_t>(depth) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << json(it.key()).dump() << ": ";
        dump(out, it.value(), depth + 1);
      }
      out << '\n' << close << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        dump(out, j[i], depth + 1);
      }
      out << '\n' << close << ']';
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x)) {
        out << format_number(x);
      } else {
        out << "null";
      }
      return;
    }
    default: out << j.dump();
  }
}

void emit(const json& j) {
  dump(std::cout, j);
  std::cout << '\n';
}

json config_json(const Entries& entries) {
  json j = json::object();
  for (const auto& [k, v] : entries) j[k] = v;
  return j;
}

std::vector<Functional> parse_functional_list(const std::string& text) {
  std::vector<Functional> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (!item.empty()) out.push_back(parse_functional(item));
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "empty functional list");
  return out;
}

std::string join(const std::vector<Functional>& fs) {
  std::string out;
  for (const Functional f : fs) {
    if (!out.empty()) out += ',';
    out += to_string(f);
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot open '" + path + "' for writing");
  return out;
}

// Options shared by the model-driven subcommands.
struct ModelArgs {
  std::string family = "independence";
  double theta = std::numeric_limits<double>::quiet_NaN();
  CLI::Option* theta_option = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--family", family, "independence, fgm, gumbel-barnett, clayton, gaussian")
        ->capture_default_str();
    theta_option = app.add_option("--theta,--rho", theta, "family parameter");
  }

  CopulaModel model() const {
    const Family f = parse_family(family);
    if (f == Family::Independence) return CopulaModel::independence();
    if (theta_option->count() == 0) {
      throw CLI::ValidationError("--theta", "family '" + family + "' needs --theta (or --rho)");
    }
    return CopulaModel(f, theta);
  }

  void echo(Entries& e, const CopulaModel& m) const {
    e.emplace_back("family", std::string(to_string(m.family())));
    e.emplace_back("theta", format_number(m.parameter()));
  }
};

CLI::App* subcommand(CLI::App& app, const std::string& name, const std::string& help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", "flat key=value config file; flags override");
  return sub;
}

// Fills options of `sub` that were not given on the command line from its
// --config file. Unknown keys are ignored so echoed headers can be reused.
void apply_config(CLI::App* sub) {
  const CLI::Option* config = sub->get_option("--config");
  if (config->count() == 0) return;
  const std::string path = config->as<std::string>();
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  const std::vector<CLI::ConfigItem> items = CLI::ConfigINI().from_config(in);
  for (const CLI::ConfigItem& item : items) {
    CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (opt == nullptr || opt == config || opt->count() > 0) continue;
    std::string value;
    for (const std::string& part : item.inputs) {
      if (!value.empty()) value += ',';
      value += part;
    }
    opt->add_result(value);
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  ModelArgs model;
  std::string prop = "1";
  std::size_t dim = 2;
  std::size_t grid = 21;
  std::size_t workers = 1;
  std::string output;
};

int run_certify(const CertifyArgs& a) {
  const CopulaModel m = a.model.model();
  const Proposition p = parse_proposition(a.prop);
  Entries echo;
  a.model.echo(echo, m);
  echo.emplace_back("prop", std::string(to_string(p)).substr(1));
  echo.emplace_back("dim", std::to_string(a.dim));
  echo.emplace_back("grid", std::to_string(a.grid));
  echo.emplace_back("workers", std::to_string(a.workers));

  CertifyOptions options;
  options.workers = a.workers;
  options.dimension = a.dim;
  std::ofstream csv;
  if (!a.output.empty()) {
    csv = open_output(a.output);
    csv << "# schema_version=" << kSchemaVersion << '\n';
    for (const auto& [k, v] : echo) csv << "# " << k << '=' << v << '\n';
    const std::size_t coords = p == Proposition::P1FullCovariance ? 4 : p == Proposition::P2VarianceOnly ? 2 : 2 * a.dim;
    std::vector<std::string> names;
    if (p == Proposition::P1FullCovariance) {
      names = {"u", "v", "s", "t"};
    } else if (p == Proposition::P2VarianceOnly) {
      names = {"u", "v"};
    } else {
      for (std::size_t i = 0; i < coords; ++i) {
        names.push_back((i < a.dim ? "u" : "v") + std::to_string(i % a.dim + 1));
      }
    }
    for (const auto& n : names) csv << n << ',';
    csv << "cov_c,cov_chat,difference\n";
    options.sink = [&csv](const ScanRow& row) {
      for (const double x : row.point) csv << format_number(x) << ',';
      csv << format_number(row.cov_c) << ',' << format_number(row.cov_chat) << ','
          << format_number(row.difference) << '\n';
    };
  }
  const DominanceCertificate cert = certify_dominance(m, p, a.grid, options);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_json(echo);
  j["proposition"] = std::string(to_string(p));
  j["certified"] = cert.certified;
  j["grid_resolution"] = cert.grid_resolution;
  j["points_evaluated"] = cert.points_evaluated;
  j["max_difference"] = cert.max_difference;
  j["tolerance"] = cert.tolerance;
  j["witness"] = cert.witness;
  if (cert.diagonal_max_difference) {
    j["diagonal_max_difference"] = *cert.diagonal_max_difference;
    j["diagonal_witness"] = cert.diagonal_witness;
  }
  if (cert.premise) {
    j["premise"] = {{"condition", std::string(to_string(cert.premise->condition))},
                    {"holds", cert.premise->holds},
                    {"worst_violation", cert.premise->worst_violation}};
  }
  if (!cert.warning.empty()) {
    j["warning"] = cert.warning;
    std::cerr << "warning: " << cert.warning << '\n';
  }
  emit(j);
  return cert.certified ? kExitOk : kExitFinding;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  ModelArgs model;
  std::size_t n = 500;
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string functional = "t1,t2,t3,t4";
  std::string output;
};

int run_simulate(const SimulateArgs& a) {
  ExperimentConfig config;
  config.model = a.model.model();
  config.n = a.n;
  config.replications = a.reps;
  config.master_seed = a.seed;
  config.workers = a.workers;
  config.functionals = parse_functional_list(a.functional);
  const Entries echo = config_entries(config);

  const ExperimentResult result = run_experiment(config);
  if (!a.output.empty()) {
    std::ofstream csv = open_output(a.output);
    write_estimates_csv(csv, result, echo);
  }
  VarianceOptions options;
  options.workers = a.workers;
  const auto comparison = compare_to_asymptotics(result, config.model, options);
  emit(summary_json(result, comparison, echo));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VarianceArgs {
  ModelArgs model;
  std::string functional = "t1";
  bool quadrature = false;
  unsigned workers = 1;
};

int run_variance(const VarianceArgs& a) {
  const CopulaModel m = a.model.model();
  const auto functionals = parse_functional_list(a.functional);
  Entries echo;
  a.model.echo(echo, m);
  echo.emplace_back("functional", join(functionals));
  echo.emplace_back("quadrature", a.quadrature ? "true" : "false");
  echo.emplace_back("workers", std::to_string(a.workers));

  VarianceOptions options;
  options.prefer_closed_form = !a.quadrature;
  options.workers = a.workers;
  json rows = json::array();
  for (const Functional f : functionals) {
    const VarianceResult rank = asymptotic_variance(f, m, EstimatorKind::RankBased, options);
    const VarianceResult known = asymptotic_variance(f, m, EstimatorKind::KnownMargin, options);
    rows.push_back({{"functional", std::string(to_string(f))},
                    {"rank", rank.variance},
                    {"known", known.variance},
                    {"results", {json(rank), json(known)}}});
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_json(echo);
  j["variances"] = rows;
  emit(j);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string input;
  std::string functional = "t1,t2,t3,t4,t5,kendall";
  std::string margins = "raw";
  std::string ties = "error";
  std::uint64_t seed = 0;
};

int run_estimate(const EstimateArgs& a) {
  const auto functionals = parse_functional_list(a.functional);
  if (a.margins != "raw" && a.margins != "uniform") {
    throw CLI::ValidationError("--margins", "expected 'raw' or 'uniform'");
  }
  if (a.ties != "error" && a.ties != "random") throw CLI::ValidationError("--ties", "expected 'error' or 'random'");
  std::ifstream in(a.input);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + a.input + "'");
  const bool uniform = a.margins == "uniform";
  const PairSample sample = read_csv(in, uniform ? MarginKind::Uniform : MarginKind::Raw);
  const TieMode tie_mode = a.ties == "random" ? TieMode::RandomBreak : TieMode::Error;

  Entries echo{{"input", a.input}, {"functional", join(functionals)}, {"margins", a.margins},
               {"ties", a.ties},   {"seed", std::to_string(a.seed)}};
  const GridFunction rank = empirical_copula(sample, tie_mode, a.seed);
  json rows = json::array();
  for (const Functional f : functionals) {
    json row{{"functional", std::string(to_string(f))}, {"rank", evaluate(f, rank)}};
    if (uniform) row["known"] = evaluate(f, known_margin_empirical(sample));
    rows.push_back(row);
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_json(echo);
  j["n"] = sample.size();
  j["estimates"] = rows;
  emit(j);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  ModelArgs model;
  std::string condition = "ltd";
  std::size_t grid = 99;
};

int run_check(const CheckArgs& a) {
  const CopulaModel m = a.model.model();
  const Condition c = parse_condition(a.condition);
  Entries echo;
  a.model.echo(echo, m);
  echo.emplace_back("condition", std::string(to_string(c)));
  echo.emplace_back("grid", std::to_string(a.grid));
  const ConditionReport r = check_condition(m, c, a.grid);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_json(echo);
  j["condition"] = std::string(to_string(c));
  j["holds"] = r.holds;
  j["worst_violation"] = r.worst_violation;
  j["witness"] = {r.witness_u, r.witness_v};
  j["grid_resolution"] = r.grid_resolution;
  j["tolerance"] = r.tolerance;
  emit(j);
  return r.holds ? kExitOk : kExitFinding;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  ModelArgs model;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  std::string output;
};

int run_sample(const SampleArgs& a) {
  const CopulaModel m = a.model.model();
  Entries echo;
  a.model.echo(echo, m);
  echo.emplace_back("n", std::to_string(a.n));
  echo.emplace_back("seed", std::to_string(a.seed));
  std::vector<std::string> comments{"schema_version=" + std::to_string(kSchemaVersion)};
  for (const auto& [k, v] : echo) comments.push_back(k + '=' + v);
  const PairSample s = m.sample(a.n, a.seed);
  if (a.output.empty()) {
    write_csv(std::cout, s, comments);
  } else {
    std::ofstream out = open_output(a.output);
    write_csv(out, s, comments);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical copula process covariances, dominance certificates and Monte Carlo"};
  app.require_subcommand(1);

  CertifyArgs certify;
  CLI::App* c = subcommand(app, "certify", "grid-scan certificate of covariance dominance");
  certify.model.attach(*c);
  c->add_option("--prop", certify.prop, "proposition: 1, 2 or 4")->capture_default_str();
  c->add_option("--dim", certify.dim, "dimension for proposition 4")->capture_default_str();
  c->add_option("--grid", certify.grid, "grid resolution per axis")->capture_default_str();
  c->add_option("--workers", certify.workers)->capture_default_str();
  c->add_option("--output", certify.output, "per-point CSV");

  SimulateArgs simulate;
  CLI::App* s = subcommand(app, "simulate", "replicated known-margin vs rank-based estimation");
  simulate.model.attach(*s);
  s->add_option("--n", simulate.n, "sample size")->capture_default_str();
  s->add_option("--reps", simulate.reps, "replications")->capture_default_str();
  s->add_option("--seed", simulate.seed, "master seed")->capture_default_str();
  s->add_option("--workers", simulate.workers, "0 = all cores")->capture_default_str();
  s->add_option("--functional", simulate.functional, "comma-separated list")->capture_default_str();
  s->add_option("--output", simulate.output, "per-replication CSV");

  VarianceArgs variance;
  CLI::App* v = subcommand(app, "variance", "asymptotic variances of the plug-in estimators");
  variance.model.attach(*v);
  v->add_option("--functional", variance.functional, "comma-separated list")->capture_default_str();
  v->add_flag("--quadrature", variance.quadrature, "skip closed forms");
  v->add_option("--workers", variance.workers, "0 = all cores")->capture_default_str();

  EstimateArgs estimate;
  CLI::App* e = subcommand(app, "estimate", "plug-in estimates from a sample CSV");
  e->add_option("--input", estimate.input, "CSV with header and two columns")->required();
  e->add_option("--functional", estimate.functional, "comma-separated list")->capture_default_str();
  e->add_option("--margins", estimate.margins, "raw, or uniform to add known-margin estimates")
      ->capture_default_str();
  e->add_option("--ties", estimate.ties, "error or random")->capture_default_str();
  e->add_option("--seed", estimate.seed, "seed for random tie breaking")->capture_default_str();

  CheckArgs check;
  CLI::App* k = subcommand(app, "check", "check a dependence condition on a grid");
  check.model.attach(*k);
  k->add_option("--condition", check.condition, "ltd, pqd, nqd, condition3")->capture_default_str();
  k->add_option("--grid", check.grid, "interior grid points per axis")->capture_default_str();

  SampleArgs sample;
  CLI::App* d = subcommand(app, "sample", "draw a sample from a model");
  sample.model.attach(*d);
  d->add_option("--n", sample.n)->capture_default_str();
  d->add_option("--seed", sample.seed)->capture_default_str();
  d->add_option("--output", sample.output, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub);
    if (c->parsed()) return run_certify(certify);
    if (s->parsed()) return run_simulate(simulate);
    if (v->parsed()) return run_variance(variance);
    if (e->parsed()) return run_estimate(estimate);
    if (k->parsed()) return run_check(check);
    if (d->parsed()) return run_sample(sample);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::Error& err) {
    app.exit(err);
    return kExitUsage;
  } catch (const Error& err) {
    std::cerr << "error [" << to_string(err.code()) << "]: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
