#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "stablenorm/space_io.hpp"

using namespace sn;

int main(int argc, char** argv) {
  CLI::App app{"Stable norms and minimal geodesics on periodic spaces"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  RunConfig cfg;
  std::string horizons;
  std::vector<std::string> build_args;

  auto common = [&](CLI::App* c) {
    c->add_option("--space", cfg.space_path, "serialized space file");
    c->add_option("--spec", cfg.spec_path, "builder YAML");
    c->add_option("--out", cfg.out_dir, "output directory (default $STABLENORM_OUT or .)");
    c->add_option("--tol", cfg.tol, "tolerance (default per command)");
    c->add_option("--seed", cfg.seed, "seed for randomized suites");
    c->add_option("--workers", cfg.workers, "worker threads");
    c->add_option("--resolution", cfg.resolution, "grid resolution");
    c->add_option("--horizons", horizons, "comma-separated increasing horizons");
    c->add_option("--depth", cfg.depth, "edge construction depth");
  };
  auto* build = app.add_subcommand("build", "build a space and its constants ledger");
  common(build);
  build->add_option("args", build_args, "flat <n> <resolution>");
  auto* ball = app.add_subcommand("stable-ball", "sample the stable unit ball and analyse its hull");
  common(ball);
  ball->add_option("--radius", cfg.radius, "sup-norm radius of the sampled directions");
  auto* cls = app.add_subcommand("classify", "construct and classify minimal rays on the ball polytope");
  common(cls);
  auto* self = app.add_subcommand("selftest", "property suites");
  common(self);
  self->add_option("--iterations", cfg.iterations, "cases per suite");
  self->add_flag("--inject-broken-hull", cfg.inject_broken_hull, "add a broken hull to the bound suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kUsage;
  }

  try {
    if (!horizons.empty()) {
      std::stringstream ss(horizons);
      for (std::string tok; std::getline(ss, tok, ',');) cfg.horizons.push_back(std::stod(tok));
    }
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cli::kUsage;
  }

  try {
    if (build->parsed()) return cli::cmd_build(cfg, build_args, std::cout);
    if (ball->parsed()) return cli::cmd_stable_ball(cfg, std::cout);
    if (cls->parsed()) return cli::cmd_classify(cfg, std::cout);
    return cli::cmd_selftest(cfg, std::cout);
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kFailure;
  }
}
