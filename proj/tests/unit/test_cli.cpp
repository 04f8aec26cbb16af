#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cyclepart/cli.hpp"
#include "cyclepart/exactz.hpp"
#include "cyclepart/thermo.hpp"

using namespace cyclepart;
using Json = nlohmann::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args, std::optional<std::string> seed_env = std::nullopt) {
  args.insert(args.begin(), "cyclepart");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err, seed_env);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("phase report") {
  const Outcome o = invoke({"phase", "--d", "3", "--beta", "0.0795775", "--rho", "2.6"});
  REQUIRE(o.code == 0);
  CHECK(o.err.empty());
  const Json doc = Json::parse(o.out);
  const ThermoSolution s = solve_alpha(SystemParams{3, 0.0795775, 2.6, std::nullopt}, 1e-10);
  const Json& r = doc["result"];
  CHECK(r["regime"] == std::string(to_string(s.regime)));
  CHECK(r["alpha"].get<double>() == s.alpha);
  CHECK(r["rho_c"].get<double>() == s.rho_c);
  CHECK(r["beta_c"].get<double>() == s.beta_c);
  CHECK(r["condensate_fraction"].get<double>() == s.condensate_fraction);
  CHECK(r.contains("root_residual"));

  const Json& c = doc["config"];
  CHECK(c["command"] == "phase");
  CHECK(c["d"] == 3);
  CHECK(c["beta"].get<double>() == 0.0795775);
  CHECK(c["tol"].get<double>() == 1e-10);
  CHECK(c["K"] == 5000);
  CHECK(c["format"] == "json");
  CHECK(c["n"].is_null());
  CHECK(c["seed"] == 1);
}

TEST_CASE("infinite constants are emitted as strings") {
  const Outcome o = invoke({"phase", "--d", "1", "--beta", "1", "--rho", "1"});
  REQUIRE(o.code == 0);
  const Json r = Json::parse(o.out)["result"];
  CHECK(r["rho_c"] == "inf");
  CHECK(r["beta_c"] == "inf");
  CHECK(r["regime"] == "normal");
}

TEST_CASE("exact-z with the permutation oracle") {
  const Outcome o = invoke({"exact-z", "--d", "3", "--beta", "1", "--rho", "1", "--n", "8", "--oracle"});
  REQUIRE(o.code == 0);
  const Json r = Json::parse(o.out)["result"];
  CHECK(r["relative_difference"].get<double>() < 1e-12);
  CHECK(r["log_Z"].get<double>() == exact_log_Z(SystemParams{3, 1.0, 1.0, 8}));
  CHECK(r["log_Z_confined_lower"].get<double>() <= r["log_Z"].get<double>());
  CHECK(r["log_Z_confinement_shift_bound"].get<double>() >= 0.0);
}

TEST_CASE("sample output is byte-identical for a fixed seed") {
  const std::vector<std::string> args = {"sample", "--d", "3", "--beta", "0.0795775", "--rho", "5.2",
                                         "--n", "2000", "--steps", "2000000", "--seed", "42"};
  const Outcome a = invoke(args);
  const Outcome b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const Json doc = Json::parse(a.out);
  CHECK(doc["config"]["seed"] == 42);
  CHECK(doc["config"]["burn_in"] == 200000);
  const Json& r = doc["result"];
  CHECK(r["cycle_stats"].size() == 50);
  CHECK(r["max_audit_error"].get<double>() <= 1e-10);
  CHECK(r["long_cycle_fraction"].get<double>() > 0.3);
  CHECK(r.contains("long_cycle_stderr"));
}

TEST_CASE("seed from the environment") {
  const std::vector<std::string> args = {"sample", "--n", "50", "--steps", "20000"};
  const Outcome env = invoke(args, "42");
  std::vector<std::string> flagged = args;
  flagged.insert(flagged.end(), {"--seed", "42"});
  const Outcome flag = invoke(flagged);
  REQUIRE(env.code == 0);
  CHECK(env.out == flag.out);
  CHECK(Json::parse(env.out)["config"]["seed"] == 42);
  // The flag wins over the environment.
  std::vector<std::string> other = args;
  other.insert(other.end(), {"--seed", "7"});
  CHECK(Json::parse(invoke(other, "42").out)["config"]["seed"] == 7);
  const Outcome bad = invoke(args, "forty-two");
  CHECK(bad.code == cli::kExitValidation);
  CHECK(bad.out.empty());
}

TEST_CASE("exit codes") {
  SUBCASE("unknown command") {
    const Outcome o = invoke({"teleport"});
    CHECK(o.code == cli::kExitUsage);
    CHECK(o.out.empty());
    CHECK(o.err.find("Usage") != std::string::npos);
  }
  SUBCASE("unparseable flags") {
    CHECK(invoke({"phase", "--beta", "abc"}).code == cli::kExitUsage);
    CHECK(invoke({"phase", "--bogus", "1"}).code == cli::kExitUsage);
    CHECK(invoke({"phase", "--format", "xml"}).code == cli::kExitUsage);
    CHECK(invoke({}).code == cli::kExitUsage);
  }
  SUBCASE("validation") {
    for (const auto& args : std::vector<std::vector<std::string>>{{"phase", "--d", "0"},
                                                                  {"phase", "--beta", "-1"},
                                                                  {"alpha", "--rho", "0"},
                                                                  {"exact-z"},
                                                                  {"minimize", "--K", "10"},
                                                                  {"phase", "--tol", "0"}}) {
      const Outcome o = invoke(args);
      INFO(args[0] << " " << (args.size() > 1 ? args[1] : ""));
      CHECK(o.code == cli::kExitValidation);
      CHECK(o.out.empty());
      CHECK_FALSE(o.err.empty());
    }
  }
  SUBCASE("caps and precision") {
    CHECK(invoke({"exact-z", "--n", "71"}).code == cli::kExitPrecision);
    CHECK(invoke({"exact-z", "--n", "10", "--oracle"}).code == cli::kExitPrecision);
    CHECK(invoke({"phase", "--d", "2", "--rho", "1000"}).code == cli::kExitPrecision);
    CHECK(invoke({"sample", "--n", "100001", "--steps", "10"}).code == cli::kExitPrecision);
  }
  SUBCASE("help") { CHECK(invoke({"--help"}).code == cli::kExitOk); }
}

TEST_CASE("csv headers") {
  auto header_after_comments = [](const std::string& text) {
    for (const auto& line : lines(text)) {
      if (!line.starts_with("#")) return line;
    }
    return std::string();
  };
  SUBCASE("scalar results") {
    const Outcome o = invoke({"phase", "--format", "csv"});
    REQUIRE(o.code == 0);
    const auto ls = lines(o.out);
    REQUIRE(ls.size() == 3);
    CHECK(Json::parse(ls[0].substr(2))["command"] == "phase");
    CHECK(ls[1] == "regime,alpha,root_residual,rho_c,beta_c,condensate_fraction,tol");
  }
  SUBCASE("tables") {
    CHECK(header_after_comments(invoke({"converge", "--format", "csv", "--n-list", "5,10"}).out) ==
          "n,logZ_per_n,neg_chi,gap");
    CHECK(header_after_comments(invoke({"sample", "--format", "csv", "--n", "30", "--steps", "1000"}).out) ==
          "k,mean_qhat,stderr");
    CHECK(header_after_comments(
              invoke({"scan-long-cycles", "--format", "csv", "--n-list", "20,40", "--steps", "1000"}).out) ==
          "n,fraction,stderr");
    const Outcome m = invoke({"minimize", "--format", "csv", "--K", "100", "--rho", "0.1"});
    REQUIRE(m.code == 0);
    CHECK(header_after_comments(m.out) == "k,qhat,reference_qhat");
    CHECK(lines(m.out).size() == 3 + 100);
  }
  SUBCASE("converge rows") {
    const Outcome o = invoke({"converge", "--d", "1", "--beta", "1", "--rho", "1", "--n-list", "10,20,40"});
    REQUIRE(o.code == 0);
    const Json rows = Json::parse(o.out)["result"]["rows"];
    REQUIRE(rows.size() == 3);
    const auto expected = convergence_scan(SystemParams{1, 1.0, 1.0, std::nullopt}, std::vector<int>{10, 20, 40}, 1e-10);
    for (std::size_t i = 0; i < 3; ++i) CHECK(rows[i]["gap"].get<double>() == expected[i].gap);
  }
}

TEST_CASE("output file") {
  const auto path = std::filesystem::temp_directory_path() / "cyclepart_cli_test.json";
  std::filesystem::remove(path);
  const Outcome o = invoke({"free-energy", "--output", path.string()});
  REQUIRE(o.code == 0);
  CHECK(o.out.empty());
  const Json doc = Json::parse(slurp(path));
  CHECK(doc["config"]["output"] == path.string());
  const Json& r = doc["result"];
  CHECK(r["free_energy"].get<double>() < 0.0);
  CHECK(r.contains("free_energy_error"));
  const double beta = doc["config"]["beta"].get<double>(), rho = doc["config"]["rho"].get<double>();
  CHECK(r["free_energy"].get<double>() == doctest::Approx(rho / beta * r["chi"].get<double>()).epsilon(1e-12));
  std::filesystem::remove(path);
  CHECK(invoke({"phase", "--output", "/nonexistent-dir/x.json"}).code == cli::kExitValidation);
}

TEST_CASE("run with a config struct") {
  cli::RunConfig c;
  c.command = cli::Command::alpha;
  c.params = SystemParams{3, 1.0, 0.01, std::nullopt};
  std::ostringstream out, err;
  REQUIRE(cli::run(c, out, err) == 0);
  const Json r = Json::parse(out.str())["result"];
  CHECK(r["alpha"].get<double>() == solve_alpha(c.params, 1e-10).alpha);
  CHECK(r["tol"].get<double>() == 1e-10);
  CHECK(cli::parse_command("scan-long-cycles") == cli::Command::scan_long_cycles);
  CHECK_FALSE(cli::parse_command("scan"));
  CHECK(cli::to_string(cli::Command::free_energy) == "free-energy");
}

TEST_CASE("the installed binary separates data from diagnostics") {
  const char* bin = std::getenv("CYCLEPART_BIN");
  if (bin == nullptr) return;
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / "cyclepart_bin_out.txt", err = dir / "cyclepart_bin_err.txt";
  auto sh = [&](const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + std::string(bin) + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(sh("phase --d 3") == 0);
  CHECK(Json::accept(slurp(out)));
  CHECK(slurp(err).empty());
  CHECK(sh("nope") == 1);
  CHECK(slurp(out).empty());
  CHECK(sh("phase --d 0") == 2);
  CHECK(sh("exact-z --n 80") == 3);
  CHECK(sh("sample --n 20 --steps 1000", "CYCLEPART_SEED=9") == 0);
  CHECK(Json::parse(slurp(out))["config"]["seed"] == 9);
  std::filesystem::remove(out);
  std::filesystem::remove(err);
}
