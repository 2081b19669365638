#include "doctest.h"

#include "wlc/job.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wlc;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wlc_job_" + name);
}

JobConfig small(const std::string& command, const std::string& geometry) {
  JobConfig c;
  c.command = command;
  c.geometry = geometry;
  c.loops = 40;
  c.ppl = 32;
  c.quad.n_blocks = 5;
  return c;
}

}  // namespace

TEST_CASE("config text round trip") {
  std::istringstream in(
      "# run card\n"
      "command = coefficient\n"
      "geometry = two-semi-infinite   # edge\n"
      "a = 2.5\n"
      "\n"
      "loops = 123\n"
      "extrapolate = true\n"
      "method = grid\n"
      "cm-spacing = 0.1\n");
  const JobConfig c = parse_config(in);
  CHECK(c.command == "coefficient");
  CHECK(c.geometry == "two-semi-infinite");
  CHECK(c.a == 2.5);
  CHECK(c.loops == 123);
  CHECK(c.quad.extrapolate);
  CHECK(c.quad.method == CmMethod::Grid);
  CHECK(c.quad.domain.spacing == 0.1);
  std::istringstream again(c.to_text());
  const JobConfig d = parse_config(again);
  CHECK(d.key_values() == c.key_values());
  CHECK(d.settings_hash() == c.settings_hash());
}

TEST_CASE("config errors name the offending line or key") {
  std::istringstream no_eq("loops 12\n");
  CHECK_THROWS_AS(parse_config(no_eq), ConfigError);
  std::istringstream bad_num("a = 1.0\nloops = many\n");
  try {
    parse_config(bad_num);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  JobConfig c;
  CHECK_THROWS_AS(c.set("colour", "blue"), ConfigError);
  CHECK_THROWS_AS(c.set("deterministic", "maybe"), ConfigError);
  c.a = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  JobConfig g;
  g.geometry = "sphere";
  CHECK_THROWS_AS(g.validate(), ConfigError);
  CHECK_THROWS_AS(load_config(temp_path("does_not_exist.cfg")), ConfigError);
}

TEST_CASE("settings hash ignores bookkeeping keys") {
  JobConfig a = small("energy", "perpendicular"), b = a;
  b.output = "x.json";
  b.quad.threads = 7;
  b.command = "coefficient";
  CHECK(a.settings_hash() == b.settings_hash());
  b.seed = 2;
  CHECK(a.settings_hash() != b.settings_hash());
}

TEST_CASE("every config key has a matching setter") {
  JobConfig c;
  for (const auto& k : config_keys()) {
    bool listed = false;
    for (const auto& [key, value] : c.key_values()) listed = listed || key == k.key;
    CHECK_MESSAGE(listed, k.key);
  }
}

TEST_CASE("checkpointed runs resume to bitwise identical results") {
  const auto cp = temp_path("resume.json");
  std::filesystem::remove(cp);
  JobConfig full = small("energy", "one-semi-infinite");
  std::ostringstream log;
  const JobOutcome reference = run_job(full, log);
  REQUIRE(reference.exit_code == kExitOk);

  JobConfig part = full;
  part.checkpoint = cp.string();
  part.stop_after_blocks = 2;
  const JobOutcome first = run_job(part, log);
  CHECK(first.exit_code == kExitOk);
  CHECK(first.record["status"] == "incomplete");
  CHECK(first.record["blocks_done"] == 2);
  const JobOutcome second = run_job(part, log);
  CHECK(second.record["blocks_done"] == 4);
  part.stop_after_blocks = 0;
  const JobOutcome done = run_job(part, log);
  REQUIRE(done.record["status"] == "complete");
  CHECK(done.record["result"]["value"].get<double>() == reference.record["result"]["value"].get<double>());
  CHECK(done.record["result"]["blocks"] == reference.record["result"]["blocks"]);

  JobConfig other = part;
  other.seed = 99;
  const JobOutcome rejected = run_job(other, log);
  CHECK(rejected.exit_code == kExitConfig);
  std::filesystem::remove(cp);
}

TEST_CASE("job commands and exit codes") {
  std::ostringstream log;
  const auto ens = temp_path("ens.wlc");
  JobConfig gen = small("gen", "perpendicular");
  gen.output = ens.string();
  REQUIRE(run_job(gen, log).exit_code == kExitOk);

  JobConfig stored = small("coefficient", "perpendicular");
  stored.ensemble = ens.string();
  const JobOutcome c = run_job(stored, log);
  REQUIRE(c.exit_code == kExitOk);
  CHECK(c.record["coefficient"]["name"] == "gamma_perp");
  CHECK(c.record["coefficient"]["value"].get<double>() > 0);
  CHECK(c.record["ensemble"]["loops"] == 40);

  JobConfig generated = stored;
  generated.ensemble.clear();
  CHECK(run_job(generated, log).record["result"]["value"] == c.record["result"]["value"]);

  JobConfig missing = stored;
  missing.ensemble = temp_path("missing.wlc").string();
  CHECK(run_job(missing, log).exit_code == kExitIo);

  JobConfig area;
  area.command = "effective-area";
  area.plate_area = 1.44e-6;
  area.c_1si = 3.6e-3;
  area.c_2si = 1.2e-3;
  area.a = 3e-6;
  const JobOutcome e = run_job(area, log);
  REQUIRE(e.exit_code == kExitOk);
  CHECK(e.record["relative_correction"].get<double>() == doctest::Approx(2.19e-3).epsilon(5e-3));
  area.plate_area = 0;
  CHECK(run_job(area, log).exit_code == kExitConfig);

  JobConfig comb = small("coefficient", "comb");
  comb.spacing = 10;
  comb.teeth = 3;
  const JobOutcome f = run_job(comb, log);
  REQUIRE(f.exit_code == kExitOk);
  CHECK(f.record["result"]["value"].get<double>() < 0);
  CHECK(f.record["estimate"].get<double>() == doctest::Approx(-1.2e-3));
  comb.command = "energy";
  const JobOutcome g = run_job(comb, log);
  REQUIRE(g.exit_code == kExitOk);
  CHECK(g.record["result"]["value"].get<double>() < 0);

  JobConfig grid = small("density", "perpendicular");
  grid.grid.nx = 5;
  grid.grid.nz = 4;
  CHECK(run_job(grid, log).exit_code == kExitConfig);
  grid.grid_output = temp_path("grid.csv").string();
  CHECK(run_job(grid, log).exit_code == kExitOk);

  JobConfig tight = small("energy", "perpendicular");
  tight.quad.method = CmMethod::Grid;
  tight.quad.domain.z_hi = 1.5;
  CHECK(run_job(tight, log).exit_code == kExitConfig);
}
