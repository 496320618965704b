#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "ncauth/cli.hpp"

using namespace ncauth;
using cli::ScenarioConfig;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ncauth_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RunOutcome {
  int code = -1;
  std::string out, err;
  cli::json report;
};

RunOutcome run(ScenarioConfig cfg) {
  RunOutcome r;
  std::ostringstream out, err;
  cfg.json_output = true;
  r.code = cli::run_scenario(cfg, out, err);
  r.out = out.str();
  r.err = err.str();
  if (r.code == 0 && !r.out.empty()) r.report = cli::json::parse(r.out);
  return r;
}

ScenarioConfig base_config(const std::string& experiment, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.experiment = experiment;
  cfg.seed = seed;
  cfg.seed_set = true;
  return cfg;
}

}  // namespace

TEST_CASE("size strings parse exactly") {
  CHECK(cli::parse_size("1500") == 1'500);
  CHECK(cli::parse_size("18M") == 18'000'000);
  CHECK(cli::parse_size("1.8G") == 1'800'000'000);
  CHECK(cli::parse_size("4.05G") == 4'050'000'000);
  CHECK(cli::parse_size("1.5K") == 1'500);
  CHECK(cli::parse_size("1.23K") == 1'230);
  CHECK(cli::parse_size("2T") == 2'000'000'000'000);

  CHECK_THROWS_AS(cli::parse_size(""), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_size("G"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_size("12x"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_size("1.2.3"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_size("1.8"), cli::ConfigError);      // fractional bytes
  CHECK_THROWS_AS(cli::parse_size("1.2345K"), cli::ConfigError);  // below one byte
}

TEST_CASE("config files map onto the scenario") {
  const cli::json j = {
      {"field", {{"p", 2}, {"e", 1}, {"l", 3}, {"seed", 9}}},
      {"scheme", {{"k", 3}, {"V", 4}, {"M", 2}}},
      {"experiment", "attack"},
      {"seed", 77},
      {"output", "json"},
      {"attack", {{"K", 2}, {"H", 2}, {"n", 2}, {"trials", 10}}},
      {"goodput", {{"topology", "topologies/topo_b.json"}, {"r_c", {1, 2}}, {"simulate", false}}},
      {"simulate", {{"network", "net.json"}, {"corrupt_nodes", {"R1"}}, {"messages", {1, 2}}}},
      {"filedist", {{"file_size_bytes", 123}, {"payload_accounting", true}}},
      {"keygen", {{"out_dir", "keys_out"}, {"prefix", "demo"}}},
  };
  const ScenarioConfig cfg = cli::config_from_json(j);
  CHECK(cfg.field.p == 2);
  CHECK(cfg.field.l == 3);
  CHECK(cfg.scheme.k == 3);
  CHECK(cfg.scheme.V == 4);
  CHECK(cfg.scheme.M == 2);
  CHECK(cfg.experiment == "attack");
  CHECK(cfg.seed == 77);
  CHECK(cfg.seed_set);
  CHECK(cfg.json_output);
  CHECK(cfg.attack_K == 2);
  CHECK(cfg.attack_trials == 10);
  CHECK(cfg.topology_path == "topologies/topo_b.json");
  CHECK(cfg.r_c_values == std::vector<std::uint32_t>{1, 2});
  CHECK_FALSE(cfg.goodput_simulate);
  CHECK(cfg.network_path == "net.json");
  CHECK(cfg.corrupt_nodes == std::vector<std::string>{"R1"});
  CHECK(cfg.message_labels == std::vector<std::uint64_t>{1, 2});
  CHECK(cfg.file_size_bytes == 123);
  CHECK(cfg.payload_accounting);
  CHECK(cfg.out_dir == "keys_out");
  CHECK(cfg.prefix == "demo");
}

TEST_CASE("config validation") {
  ScenarioConfig cfg = base_config("simulate", 1);

  SECTION("seed is mandatory outside filedist") {
    cfg.seed_set = false;
    CHECK_THROWS_AS(cli::validate_config(cfg), cli::ConfigError);
    cfg.experiment = "filedist";
    CHECK_NOTHROW(cli::validate_config(cfg));
  }
  SECTION("the field must offer at least V points") {
    const auto f = gf::make_field(cfg.field);  // q^l = 4
    cfg.scheme.V = 5;
    CHECK_THROWS_AS(cli::validate_config(cfg, &f), cli::ConfigError);
    cfg.scheme.V = 4;
    CHECK_NOTHROW(cli::validate_config(cfg, &f));
  }
  SECTION("soft warnings") {
    cfg.scheme.M = 1;
    auto warnings = cli::validate_config(cfg, nullptr, 3);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("below the generation size") != std::string::npos);

    ScenarioConfig atk = base_config("attack", 1);
    atk.attack_H = 5;
    warnings = cli::validate_config(atk);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("exceeds the key reuse bound") != std::string::npos);
  }
}

TEST_CASE("keygen writes a deterministic bundle") {
  const fs::path dir1 = fresh_dir("keygen1");
  const fs::path dir2 = fresh_dir("keygen2");

  ScenarioConfig cfg = base_config("keygen", 12345);
  cfg.scheme = {2, 2, 2};
  cfg.out_dir = dir1.string();

  const auto r1 = run(cfg);
  REQUIRE(r1.code == 0);
  CHECK(r1.report["polynomials"] == 3);
  CHECK(r1.report["coefficients_per_polynomial"] == 2);
  REQUIRE(r1.report["files"].size() == 4);  // source, points, two verifiers

  const auto src = cli::json::parse(slurp(dir1 / "keys_source_key.json"));
  CHECK(src["type"] == "source_key");
  CHECK(src["marker"] == "SECRET");
  REQUIRE(src["polynomials"].size() == 3);
  for (const auto& poly : src["polynomials"]) CHECK(poly.size() == 2);

  const auto pts = cli::json::parse(slurp(dir1 / "keys_public_points.json"));
  CHECK(pts["type"] == "public_points");
  CHECK(pts["x"].size() == 2);

  const auto vk0 = cli::json::parse(slurp(dir1 / "keys_verifier_key_0.json"));
  CHECK(vk0["type"] == "verifier_key");
  CHECK(vk0["marker"] == "SECRET");
  CHECK(vk0["index"] == 0);
  CHECK(vk0["evals"].size() == 3);

  SECTION("same seed, byte-identical files") {
    cfg.out_dir = dir2.string();
    REQUIRE(run(cfg).code == 0);
    for (const auto* name :
         {"keys_source_key.json", "keys_public_points.json", "keys_verifier_key_0.json",
          "keys_verifier_key_1.json"}) {
      CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }
  }
  SECTION("different seed, different key") {
    cfg.out_dir = dir2.string();
    cfg.seed = 54321;
    REQUIRE(run(cfg).code == 0);
    CHECK(slurp(dir1 / "keys_source_key.json") != slurp(dir2 / "keys_source_key.json"));
    CHECK(slurp(dir1 / "keys_public_points.json") != slurp(dir2 / "keys_public_points.json"));
  }
  SECTION("table names the bundle shape") {
    std::ostringstream out, err;
    cfg.json_output = false;
    cfg.out_dir = dir2.string();
    REQUIRE(cli::run_scenario(cfg, out, err) == 0);
    CHECK(out.str().find("3 polynomials x 2 coefficients") != std::string::npos);
  }
}

TEST_CASE("keygen rejects more verifiers than field points") {
  ScenarioConfig cfg = base_config("keygen", 7);
  cfg.out_dir = fresh_dir("keygen_reject").string();
  cfg.scheme.V = 5;  // q^l = 4
  const auto r = run(cfg);
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("simulate runs the identity relay network end to end") {
  ScenarioConfig cfg = base_config("simulate", 31337);
  cfg.network_path = "topologies/topo_a_fig1.json";
  cfg.message_labels = {1, 2, 3};

  const auto r = run(cfg);
  REQUIRE(r.code == 0);
  CHECK(r.report["decodable"] == true);
  CHECK(r.report["decode"]["D1"]["success"] == true);
  CHECK(r.report["decode"]["D1"]["matches_source"] == true);
  CHECK(r.report["decode"]["D1"]["decoded"] == cli::json({1, 2, 3}));
  CHECK(r.report["counters"]["match"] == true);
  // default M=2 sits below this network's n=3
  REQUIRE(r.report["warnings"].size() == 1);

  // every verification at D1 accepted
  for (const auto& entry : r.report["verify_log"]) {
    CHECK(entry["node"] == "D1");
    CHECK(entry["accepted"] == true);
  }
  CHECK(r.report["verify_log"].size() == 3);
}

TEST_CASE("simulate counter report matches the formulas") {
  const fs::path dir = fresh_dir("simnet");
  const cli::json net = {
      {"n", 2},
      {"nodes",
       {{{"id", "S"}, {"role", "source"}},
        {{"id", "D1"}, {"role", "destination"}, {"verifying", true}}}},
      {"edges",
       {{{"id", "e1"}, {"from", "S"}, {"to", "D1"}, {"coeffs", {1, 0}}},
        {{"id", "e2"}, {"from", "S"}, {"to", "D1"}, {"coeffs", {0, 1}}}}}};
  json_io::save_file((dir / "pair.json").string(), net);

  SECTION("(n,k,M,h) = (2,2,3,2)") {
    ScenarioConfig cfg = base_config("simulate", 5);
    cfg.scheme = {2, 2, 3};
    cfg.network_path = (dir / "pair.json").string();
    const auto r = run(cfg);
    REQUIRE(r.code == 0);
    const auto& c = r.report["counters"];
    CHECK(c["tag"]["frobenius"] == 4);        // n(M-1)
    CHECK(c["tag"]["mults"] == 12);           // nkM
    CHECK(c["verify"]["exponent_type_total"] == 4);  // h((M-1)+(k-2))
    CHECK(c["verify"]["mults"] == 10);        // h((M+1)+(k-1))
    CHECK(c["verify"]["edges_verified"] == 2);
    CHECK(c["match"] == true);
    CHECK(c["formulas_times_l"]["tag_mults"] == 24);  // l = 2
  }
  SECTION("n=1, k=1, M=1 needs no frobenius at the source") {
    const cli::json single = {
        {"n", 1},
        {"nodes",
         {{{"id", "S"}, {"role", "source"}},
          {{"id", "D1"}, {"role", "destination"}, {"verifying", true}}}},
        {"edges", {{{"id", "e1"}, {"from", "S"}, {"to", "D1"}, {"coeffs", {1}}}}}};
    json_io::save_file((dir / "single.json").string(), single);
    ScenarioConfig cfg = base_config("simulate", 5);
    cfg.scheme = {1, 2, 1};
    cfg.network_path = (dir / "single.json").string();
    const auto r = run(cfg);
    REQUIRE(r.code == 0);
    CHECK(r.report["counters"]["tag"]["frobenius"] == 0);
    CHECK(r.report["counters"]["match"] == true);
  }
}

TEST_CASE("attack prints the exact census") {
  ScenarioConfig cfg = base_config("attack", 99);
  cfg.scheme = {2, 2, 1};

  const auto r = run(cfg);
  REQUIRE(r.code == 0);
  CHECK(r.report["consistent_keys"] == 4);
  CHECK(r.report["candidate_dimension"] == 1);
  CHECK(r.report["substitution_success"]["num"] == 1);
  CHECK(r.report["substitution_success"]["den"] == 4);
  CHECK(r.report["substitution_success"]["text"] == "1/4");

  std::ostringstream out, err;
  cfg.json_output = false;
  REQUIRE(cli::run_scenario(cfg, out, err) == 0);
  CHECK(out.str().find("substitution success: 1/4") != std::string::npos);
}

TEST_CASE("attack determinism and parameter errors") {
  ScenarioConfig cfg = base_config("attack", 4242);
  cfg.scheme = {2, 3, 2};
  cfg.attack_H = 2;
  cfg.attack_n = 2;
  cfg.attack_trials = 50;

  const auto a = run(cfg);
  const auto b = run(cfg);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  SECTION("coalition larger than the key pool") {
    cfg.attack_K = 3;  // needs V >= 4
    CHECK(run(cfg).code == 2);
  }
}

TEST_CASE("goodput table for the butterfly") {
  ScenarioConfig cfg = base_config("goodput", 8);
  cfg.topology_path = "topologies/topo_b.json";

  const auto r = run(cfg);
  REQUIRE(r.code == 0);
  const auto& rows = r.report["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["avg"]["text"] == "1/3");
  CHECK(rows[1]["avg"]["text"] == "1/6");
  CHECK(rows[2]["avg"]["text"] == "0");
  CHECK(rows[0]["gain"]["text"] == "2/3");
  CHECK(rows[1]["gain"]["text"] == "5/6");
  CHECK(rows[2]["gain"]["text"] == "1");
  for (const auto& row : rows) {
    CHECK(row["simulated_matches_closed_form"] == true);
    CHECK(row["scheme_on_goodput_one"] == true);
  }
  CHECK(r.report["csv"] ==
        "r_c,min,max,avg,gain\n1,1/4,1/2,1/3,2/3\n2,0,1/4,1/6,5/6\n3,0,0,0,1\n");

  std::ostringstream out, err;
  cfg.json_output = false;
  REQUIRE(cli::run_scenario(cfg, out, err) == 0);
  CHECK(out.str().find("r_c   min   max   avg   gain") != std::string::npos);
  CHECK(out.str().find("1/3") != std::string::npos);
}

TEST_CASE("goodput flags the reconstructed variant and serves reference data") {
  SECTION("reconstruction hypothesis is surfaced") {
    ScenarioConfig cfg = base_config("goodput", 8);
    cfg.topology_path = "topologies/topo_a_table.json";
    cfg.goodput_simulate = false;
    const auto r = run(cfg);
    REQUIRE(r.code == 0);
    CHECK(r.report["reconstruction_hypothesis"] == true);
    CHECK(r.report["rows"][0]["avg"]["text"] == "1/2");
  }
  SECTION("reference-only placeholder") {
    ScenarioConfig cfg = base_config("goodput", 8);
    cfg.topology_path = "topologies/topo_c_placeholder.json";
    const auto r = run(cfg);
    REQUIRE(r.code == 0);
    CHECK(r.report["reference_only"] == true);
    REQUIRE(r.report["reference"]["rows"].size() == 6);
    CHECK(r.report["reference"]["rows"][1]["avg"] == "4/15");
  }
}

TEST_CASE("filedist command emits the plan") {
  ScenarioConfig cfg;
  cfg.experiment = "filedist";
  cfg.file_size_bytes = cli::parse_size("1.8G");

  const auto r = run(cfg);
  REQUIRE(r.code == 0);
  CHECK(r.report["N"] == 10);
  CHECK(r.report["l_bytes"] == 15'000);
  CHECK(r.report["M"] == 120'000);

  std::ostringstream out, err;
  cfg.json_output = false;
  REQUIRE(cli::run_scenario(cfg, out, err) == 0);
  CHECK(out.str().find("N=10") != std::string::npos);
}

TEST_CASE("scenario level failures exit with code 2") {
  SECTION("unknown experiment") {
    CHECK(run(base_config("bogus", 1)).code == 2);
  }
  SECTION("missing seed") {
    ScenarioConfig cfg;
    cfg.experiment = "attack";
    const auto r = run(cfg);
    CHECK(r.code == 2);
    CHECK(r.err.find("seed") != std::string::npos);
  }
  SECTION("missing network file") {
    ScenarioConfig cfg = base_config("simulate", 1);
    cfg.network_path = "does_not_exist.json";
    CHECK(run(cfg).code == 2);
  }
  SECTION("missing topology") {
    ScenarioConfig cfg = base_config("goodput", 1);
    CHECK(run(cfg).code == 2);
  }
  SECTION("filedist without a size") {
    ScenarioConfig cfg;
    cfg.experiment = "filedist";
    CHECK(run(cfg).code == 2);
  }
}

TEST_CASE("reports can be routed to a file") {
  const fs::path dir = fresh_dir("outfile");
  ScenarioConfig cfg;
  cfg.experiment = "filedist";
  cfg.file_size_bytes = 18'000'000;
  cfg.json_output = true;
  cfg.out_path = (dir / "plan.json").string();

  std::ostringstream out, err;
  REQUIRE(cli::run_scenario(cfg, out, err) == 0);
  CHECK(out.str().empty());
  const auto j = cli::json::parse(slurp(dir / "plan.json"));
  CHECK(j["N"] == 1);
}

TEST_CASE("enumeration cap env override") {
  unsetenv("NCAUTH_MAX_ENUM");
  CHECK(adversary::enum_cap_from_env() == adversary::kDefaultEnumCap);

  setenv("NCAUTH_MAX_ENUM", "12345", 1);
  CHECK(adversary::enum_cap_from_env() == 12345);

  setenv("NCAUTH_MAX_ENUM", "nonsense", 1);
  CHECK_THROWS_AS(adversary::enum_cap_from_env(), std::invalid_argument);

  unsetenv("NCAUTH_MAX_ENUM");
}
