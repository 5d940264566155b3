#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hcop/errors.hpp"
#include "hcop/pipeline.hpp"

using namespace hcop;
namespace fs = std::filesystem;

TEST_CASE("config text round-trips through print and parse") {
  PipelineConfig c;
  c.m = 16;
  c.delta = 2e-3;
  c.out_dir = "elsewhere";
  const PipelineConfig back = parse_config(print_config(c));
  CHECK(back.m == 16);
  CHECK(back.delta == 2e-3);
  CHECK(back.out_dir == "elsewhere");
  CHECK(back.truncation == c.truncation);
}

TEST_CASE("comments, sections and quotes are tolerated; junk is not") {
  const PipelineConfig c = parse_config(
      "# leading comment\n[model]\nm = 8   # trailing\nout_dir = \"x y\"\n");
  CHECK(c.m == 8);
  CHECK(c.out_dir == "x y");
  CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config("m := 8\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config("m = eight\n"), ConfigInvalid);
}

TEST_CASE("invariant gates reject bad configs before any work") {
  PipelineConfig c;
  c.delta = 1e-12;  // below the truncation tail
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = PipelineConfig{};
  c.bits = 64;  // 9N + 53 > B
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = PipelineConfig{};
  c.m = 1024;  // m > 2^depth
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  CHECK_NOTHROW(PipelineConfig{}.validate());
}

TEST_CASE("content hash is stable and content-sensitive") {
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
  CHECK(content_hash("").size() == 16);
}

TEST_CASE("manifest json round trip") {
  RunManifest m;
  m.config_hash = "cafe";
  StageRecord s;
  s.name = "belov-check";
  s.status = "ok";
  s.cache_key = "deadbeef";
  s.wall_time_s = 0.5;
  s.checks_pass = true;
  s.artifacts.push_back({"belov.json", "0123"});
  m.stages.push_back(s);
  const RunManifest back = RunManifest::from_json(m.to_json());
  REQUIRE(back.stages.size() == 1);
  CHECK(back.config_hash == "cafe");
  CHECK(back.stages[0].cache_key == "deadbeef");
  CHECK(back.stages[0].artifacts[0].path == "belov.json");
}

TEST_CASE("empty manifest renders a report with every stage not run") {
  PipelineConfig c;
  c.out_dir = (fs::temp_directory_path() / "hcop_empty_report").string();
  fs::create_directories(c.out_dir);
  const std::string rep = emit_report(c, RunManifest{});
  CHECK(rep.find("not run") != std::string::npos);
}

TEST_CASE("rerunning an unchanged stage is a cache hit; changes invalidate") {
  PipelineConfig c;
  c.out_dir = (fs::temp_directory_path() / "hcop_cache_test").string();
  fs::remove_all(c.out_dir);

  const PipelineResult r1 = run_pipeline(c, "belov-check");
  REQUIRE(r1.manifest.stages[0].status == "ok");
  CHECK(r1.manifest.stages[0].checks_pass);
  const std::string h1 = file_hash(c.out_dir + "/belov.json");

  const PipelineResult r2 = run_pipeline(c, "belov-check");
  CHECK(r2.manifest.stages[0].status == "cached");
  CHECK(r2.manifest.stages[0].checks_pass);
  CHECK(file_hash(c.out_dir + "/belov.json") == h1);  // determinism

  // Tampering with the artifact invalidates the cache.
  std::ofstream(c.out_dir + "/belov.json", std::ios::app) << " ";
  const PipelineResult r3 = run_pipeline(c, "belov-check");
  CHECK(r3.manifest.stages[0].status == "ok");
  CHECK(file_hash(c.out_dir + "/belov.json") == h1);

  // Stopping early records nothing past the requested stage, and the report
  // flags the gaps.
  REQUIRE(r3.manifest.stages.size() == 1);
  CHECK(emit_report(c, r3.manifest).find("not run") != std::string::npos);
}
