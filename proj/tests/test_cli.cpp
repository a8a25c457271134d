#include <stdexcept>
#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/space_io.hpp"
#include "stablenorm/stable_norm.hpp"

using namespace sn;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("stablenorm_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST_CASE("build flat 2 16 writes a 256-vertex space with a matching ledger") {
  auto dir = scratch("build");
  RunConfig c;
  c.command = "build";
  c.out_dir = dir.string();
  std::ostringstream out;
  CHECK(cli::cmd_build(c, {"flat", "2", "16"}, out) == cli::kOk);
  CHECK(out.str().find("256 vertices") != std::string::npos);
  auto text = read_file((dir / cli::kSpaceFile).string());
  CHECK(text.rfind("# stablenorm ", 0) == 0);
  auto s = parse_space(text);
  CHECK(s.num_vertices() == 256);
  auto led = parse_ledger(read_file((dir / cli::kSpaceFile).string() + ".ledger"));
  CHECK(led.consistent(2));
  // recomputed from the loaded space
  HomologySolver solver(s);
  auto again = derive_ledger(solver);
  CHECK(again.diam == led.diam);
  CHECK(again.K == led.K);
  CHECK(again.D == led.D);
  CHECK_THROWS_AS(cli::cmd_build(c, {"torus"}, out), cli::UsageError);
}

TEST_CASE("malformed spec is a usage error with a line number") {
  auto dir = scratch("badspec");
  write_file((dir / "bad.yaml").string(), "builder: flat\nn: 2\nresolution: sixteen\n");
  RunConfig c;
  c.spec_path = (dir / "bad.yaml").string();
  c.out_dir = dir.string();
  std::ostringstream out;
  try {
    cli::cmd_build(c, {}, out);
    FAIL("no error");
  } catch (const cli::UsageError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("stable-ball on flat T^2; classify refuses a hull not flagged polytope-like") {
  auto dir = scratch("flat");
  RunConfig c;
  c.out_dir = dir.string();
  std::ostringstream out;
  REQUIRE(cli::cmd_build(c, {"flat", "2", "16"}, out) == cli::kOk);
  c.space_path = (dir / cli::kSpaceFile).string();
  c.command = "stable-ball";
  std::ostringstream ball;
  CHECK(cli::cmd_stable_ball(c, ball) == cli::kOk);
  // the stencil makes the graph norm polygonal, so the flag is set here
  CHECK(ball.str().find("bound min(b^2+2b+1, 2b^2-b) = 6: satisfied") != std::string::npos);
  auto report = read_file((dir / cli::kBallReport).string());
  CHECK(report.find("\npolytope_like 1\n") != std::string::npos);
  auto csv = read_file((dir / cli::kBallCsv).string());
  CHECK(csv.rfind("# stablenorm ", 0) == 0);
  // same config, same bytes
  std::ostringstream again;
  cli::cmd_stable_ball(c, again);
  CHECK(read_file((dir / cli::kBallCsv).string()) == csv);
  CHECK(again.str() == ball.str());

  auto pos = report.find("polytope_like 1");
  report.replace(pos, 15, "polytope_like 0");
  write_file((dir / cli::kBallReport).string(), report);
  std::ostringstream cls;
  c.command = "classify";
  CHECK(cli::cmd_classify(c, cls) == cli::kFailure);
  CHECK(cls.str().find("refused") != std::string::npos);
}

TEST_CASE("rank-1 space is refused by stable-ball") {
  auto dir = scratch("rank1");
  auto s = build_flat_torus(1, 8);
  write_file((dir / "s.txt").string(), serialize_space(s));
  RunConfig c;
  c.space_path = (dir / "s.txt").string();
  c.out_dir = dir.string();
  std::ostringstream out;
  CHECK(cli::cmd_stable_ball(c, out) == cli::kFailure);
  CHECK(out.str().find("degenerate") != std::string::npos);
}

TEST_CASE("missing space is a usage error") {
  RunConfig c;
  std::ostringstream out;
  CHECK_THROWS_AS(cli::cmd_stable_ball(c, out), cli::UsageError);
  c.space_path = "/nonexistent/space.txt";
  CHECK_THROWS_AS(cli::cmd_stable_ball(c, out), cli::UsageError);
}

TEST_CASE("selftest passes, fails on an injected broken hull, and rejects zero iterations") {
  RunConfig c;
  c.iterations = 5;
  std::ostringstream ok;
  CHECK(cli::cmd_selftest(c, ok) == cli::kOk);
  CHECK(ok.str().find("suite=bounds seed=1") != std::string::npos);
  CHECK(ok.str().find("selftest: PASS") != std::string::npos);
  c.inject_broken_hull = true;
  std::ostringstream broken;
  CHECK(cli::cmd_selftest(c, broken) == cli::kFailure);
  CHECK(broken.str().find("suite=bounds") != std::string::npos);
  CHECK(broken.str().find("status=FAIL detail=\"injected hull") != std::string::npos);
  c.inject_broken_hull = false;
  c.iterations = 0;
  std::ostringstream none;
  CHECK(cli::cmd_selftest(c, none) == cli::kFailure);
  CHECK(none.str().find("no tests run") != std::string::npos);
}
