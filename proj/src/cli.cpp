#include "cyclepart/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cyclepart/entropy.hpp"
#include "cyclepart/errors.hpp"
#include "cyclepart/exactz.hpp"
#include "cyclepart/sampler.hpp"

namespace cyclepart::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::pair<Command, const char*> kCommandNames[] = {
    {Command::phase, "phase"},       {Command::alpha, "alpha"},       {Command::free_energy, "free-energy"},
    {Command::minimize, "minimize"}, {Command::exact_z, "exact-z"},   {Command::converge, "converge"},
    {Command::sample, "sample"},     {Command::scan_long_cycles, "scan-long-cycles"},
};

// Non-finite values are emitted as strings so the JSON stays valid.
Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string csv_cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = to_string(c.command);
  j["d"] = c.params.d;
  j["beta"] = num(c.params.beta);
  j["rho"] = num(c.params.rho);
  j["n"] = c.params.n ? Json(*c.params.n) : Json(nullptr);
  j["tol"] = num(c.tol);
  j["K"] = c.K;
  j["format"] = c.format == Format::json ? "json" : "csv";
  j["output"] = c.output_path ? Json(*c.output_path) : Json(nullptr);
  j["seed"] = c.seed;
  j["steps"] = c.steps;
  j["burn_in"] = c.burn_in.value_or(c.steps / 10);
  j["thin"] = c.thin;
  j["n_list"] = c.n_list;
  j["oracle"] = c.oracle;
  return j;
}

// A result is a set of scalar fields plus an optional table.
struct Artifact {
  Json fields = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  std::string table_name = "rows";
};

Json solution_fields(const ThermoSolution& s) {
  Json j;
  j["regime"] = std::string(to_string(s.regime));
  j["alpha"] = num(s.alpha);
  j["root_residual"] = num(s.root_residual);
  j["rho_c"] = num(s.rho_c);
  j["beta_c"] = num(s.beta_c);
  j["condensate_fraction"] = num(s.condensate_fraction);
  return j;
}

Artifact do_phase(const RunConfig& c) {
  Artifact a;
  a.fields = solution_fields(solve_alpha(c.params, c.tol));
  a.fields["tol"] = num(c.tol);
  return a;
}

Artifact do_alpha(const RunConfig& c) {
  const ThermoSolution s = solve_alpha(c.params, c.tol);
  Artifact a;
  a.fields["regime"] = std::string(to_string(s.regime));
  a.fields["alpha"] = num(s.alpha);
  a.fields["root_residual"] = num(s.root_residual);
  a.fields["tol"] = num(c.tol);
  return a;
}

Artifact do_free_energy(const RunConfig& c) {
  const ThermoSolution s = solve(c.params, c.tol);
  Artifact a;
  a.fields = solution_fields(s);
  a.fields["free_energy"] = num(s.free_energy);
  a.fields["free_energy_error"] = num(s.free_energy_error);
  a.fields["chi"] = num(s.chi);
  a.fields["chi_error"] = num(s.free_energy_error * c.params.beta / c.params.rho);
  return a;
}

Artifact do_minimize(const RunConfig& c) {
  const MinimizeResult r = minimize_S(c.params, c.K, c.tol);
  Artifact a;
  a.fields["regime"] = std::string(to_string(r.regime));
  a.fields["K"] = c.K;
  a.fields["lambda"] = num(r.lambda);
  a.fields["S"] = num(r.S);
  a.fields["constraint_residual"] = num(r.constraint_residual);
  a.fields["excess_mass"] = num(r.excess_mass);
  a.fields["boundary_mass"] = num(r.boundary_mass);
  a.fields["iterations"] = r.iterations;
  a.table_name = "shape";
  a.columns = {"k", "qhat", "reference_qhat"};
  for (int k = 1; k <= c.K; ++k) {
    a.rows.push_back({k, num(r.shape.at(k)), num(reference_qhat(c.params, k))});
  }
  return a;
}

Artifact do_exact_z(const RunConfig& c) {
  Artifact a;
  const double log_Z = exact_log_Z(c.params);
  const ConfinementBracket b = confinement_log_Z_bracket(c.params);
  a.fields["log_Z"] = num(log_Z);
  a.fields["log_Z_confined_lower"] = num(b.log_Z_lower);
  a.fields["log_Z_confinement_shift_bound"] = num(b.max_shift);
  if (c.oracle) {
    const double brute = brute_force_log_Z(c.params);
    a.fields["log_Z_permutation_sum"] = num(brute);
    a.fields["difference"] = num(std::abs(log_Z - brute));
    a.fields["relative_difference"] = num(std::abs(log_Z - brute) / std::max(std::abs(brute), 1e-300));
  }
  return a;
}

std::vector<int> n_list_or(const RunConfig& c, std::vector<int> fallback) {
  return c.n_list.empty() ? fallback : c.n_list;
}

Artifact do_converge(const RunConfig& c) {
  const auto ns = n_list_or(c, {10, 20, 40, 60});
  Artifact a;
  a.fields["tol"] = num(c.tol);
  a.columns = {"n", "logZ_per_n", "neg_chi", "gap"};
  for (const auto& r : convergence_scan(c.params, ns, c.tol)) {
    a.rows.push_back({r.n, num(r.log_Z_per_n), num(r.neg_chi), num(r.gap)});
  }
  return a;
}

SamplerConfig sampler_config(const RunConfig& c) {
  SamplerConfig s;
  s.steps = c.steps;
  s.burn_in = c.burn_in;
  s.thin = c.thin;
  s.seed = c.seed;
  return s;
}

Artifact do_sample(const RunConfig& c) {
  const CycleStats s = run_chain(c.params, sampler_config(c));
  Artifact a;
  a.fields["n_samples"] = s.n_samples;
  a.fields["threshold"] = num(s.threshold);
  a.fields["long_cycle_fraction"] = num(s.long_cycle_fraction);
  a.fields["long_cycle_stderr"] = num(s.long_cycle_stderr);
  a.fields["tail_remainder"] = num(s.tail_remainder);
  a.fields["split_acceptance"] =
      num(s.moves.split_proposed ? double(s.moves.split_accepted) / double(s.moves.split_proposed) : 0.0);
  a.fields["merge_acceptance"] =
      num(s.moves.merge_proposed ? double(s.moves.merge_accepted) / double(s.moves.merge_proposed) : 0.0);
  a.fields["max_audit_error"] = num(s.max_audit_error);
  a.table_name = "cycle_stats";
  a.columns = {"k", "mean_qhat", "stderr"};
  for (std::size_t i = 0; i < s.mean_qhat.size(); ++i) {
    a.rows.push_back({static_cast<int>(i + 1), num(s.mean_qhat[i]), num(s.qhat_stderr[i])});
  }
  return a;
}

Artifact do_scan(const RunConfig& c) {
  const auto ns = n_list_or(c, {500, 2000, 8000});
  Artifact a;
  a.columns = {"n", "fraction", "stderr"};
  for (const auto& r : long_cycle_fraction_scan(c.params, ns, sampler_config(c))) {
    a.rows.push_back({r.n, num(r.fraction), num(r.standard_error)});
  }
  return a;
}

Artifact dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::phase: return do_phase(c);
    case Command::alpha: return do_alpha(c);
    case Command::free_energy: return do_free_energy(c);
    case Command::minimize: return do_minimize(c);
    case Command::exact_z: return do_exact_z(c);
    case Command::converge: return do_converge(c);
    case Command::sample: return do_sample(c);
    case Command::scan_long_cycles: return do_scan(c);
  }
  throw DomainError("unknown command");
}

void write_json(const RunConfig& c, const Artifact& a, std::ostream& os) {
  Json doc;
  doc["config"] = config_json(c);
  Json result = a.fields;
  if (!a.columns.empty()) {
    Json table = Json::array();
    for (const auto& row : a.rows) {
      Json obj;
      for (std::size_t i = 0; i < a.columns.size(); ++i) obj[a.columns[i]] = row[i];
      table.push_back(std::move(obj));
    }
    result[a.table_name] = std::move(table);
  }
  doc["result"] = std::move(result);
  os << doc.dump(2) << '\n';
}

// The header line carries the config; scalar results follow as comments when
// there is a table, otherwise they form the table.
void write_csv(const RunConfig& c, const Artifact& a, std::ostream& os) {
  os << "# " << config_json(c).dump() << '\n';
  if (a.columns.empty()) {
    bool first = true;
    for (const auto& [key, _] : a.fields.items()) {
      os << (first ? "" : ",") << key;
      first = false;
    }
    os << '\n';
    first = true;
    for (const auto& [_, value] : a.fields.items()) {
      os << (first ? "" : ",") << csv_cell(value);
      first = false;
    }
    os << '\n';
    return;
  }
  if (!a.fields.empty()) os << "# " << a.fields.dump() << '\n';
  for (std::size_t i = 0; i < a.columns.size(); ++i) os << (i ? "," : "") << a.columns[i];
  os << '\n';
  for (const auto& row : a.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

}  // namespace

std::string to_string(Command command) {
  for (const auto& [c, name] : kCommandNames) {
    if (c == command) return name;
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommandNames) {
    if (name == n) return c;
  }
  return std::nullopt;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Artifact artifact;
  try {
    config.params.validate();
    if (!(config.tol > 0.0)) throw DomainError("tol must be positive");
    artifact = dispatch(config);
  } catch (const CapError& e) {
    err << "cap exceeded: " << e.what() << '\n';
    return kExitPrecision;
  } catch (const PrecisionError& e) {
    err << "precision: " << e.what() << '\n';
    return kExitPrecision;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  }

  std::ostringstream buffer;
  if (config.format == Format::json) {
    write_json(config, artifact, buffer);
  } else {
    write_csv(config, artifact, buffer);
  }
  if (config.output_path) {
    std::ofstream file(*config.output_path, std::ios::binary);
    if (!file) {
      err << "cannot open output file " << *config.output_path << '\n';
      return kExitValidation;
    }
    file << buffer.str();
  } else {
    out << buffer.str();
  }
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               std::optional<std::string> seed_env) {
  CLI::App app{"Cycle statistics of the ideal Bose gas: phase constants, free energy, exact sums and sampling"};
  std::string command_name;
  std::vector<std::string> names;
  for (const auto& [c, name] : kCommandNames) names.emplace_back(name);

  RunConfig config;
  int n = 0;
  std::string format = "json";
  std::string output;
  std::optional<std::uint64_t> seed;
  std::int64_t burn_in = -1;

  app.add_option("command", command_name, "one of: phase, alpha, free-energy, minimize, exact-z, converge, sample, scan-long-cycles")
      ->required();
  app.add_option("--d", config.params.d, "dimension")->default_val(3);
  app.add_option("--beta", config.params.beta, "time horizon (generator Delta)")->default_val(1.0);
  app.add_option("--rho", config.params.rho, "particle density")->default_val(1.0);
  app.add_option("--n", n, "particle number");
  app.add_option("--tol", config.tol, "absolute/relative tolerance")->default_val(1e-10);
  app.add_option("--K", config.K, "truncation for minimize")->default_val(5000);
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->default_val("json");
  app.add_option("--output", output, "write data to this file instead of stdout");
  app.add_option("--seed", seed, std::string("RNG seed (default from ") + kSeedEnv + ", else 1)");
  app.add_option("--steps", config.steps, "chain steps")->default_val(1'000'000);
  app.add_option("--burn-in", burn_in, "burn-in steps (default steps/10)");
  app.add_option("--thin", config.thin, "thinning interval")->default_val(10);
  app.add_option("--n-list", config.n_list, "particle numbers for scans")->delimiter(',');
  app.add_flag("--oracle", config.oracle, "exact-z: also compute the permutation sum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  const auto command = parse_command(command_name);
  if (!command) {
    err << "unknown command '" << command_name << "'\n" << app.help();
    return kExitUsage;
  }
  config.command = *command;
  if (app.count("--n") > 0) config.params.n = n;
  config.format = format == "csv" ? Format::csv : Format::json;
  if (!output.empty()) config.output_path = output;
  if (burn_in >= 0) config.burn_in = burn_in;
  if (seed) {
    config.seed = *seed;
  } else if (seed_env && !seed_env->empty()) {
    try {
      std::size_t used = 0;
      config.seed = std::stoull(*seed_env, &used);
      if (used != seed_env->size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      err << kSeedEnv << " is not a 64-bit unsigned integer: " << *seed_env << '\n';
      return kExitValidation;
    }
  }
  return run(config, out, err);
}

}  // namespace cyclepart::cli
