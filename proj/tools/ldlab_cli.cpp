// ldlab <subcommand> --config <file.yaml> [--seed N] [--threads N] [--out DIR]
//
// Exit status: 0 success, 2 config or input error, 3 numeric guard tripped,
// 1 anything unexpected.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "ldlab/experiment.hpp"

namespace {

int exit_code_for(const ldlab::Error& e) { return ldlab::is_numeric_guard(e.code()) ? 3 : 2; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-degree detection lab: sampling, splitting, advantage bounds and detection experiments"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the config")->type_name("U64");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads, 0 = all cores")->type_name("N");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory overriding the config")->type_name("DIR");

  std::string config_path;
  const std::pair<const char*, const char*> commands[] = {
      {"sample", "Draw one instance and write it as JSON"},
      {"split", "Draw one instance, split it, and write both halves"},
      {"advantage", "Tabulate the low-degree advantage over a degree grid"},
      {"test", "Run the one-sided detection experiment"},
      {"hidden", "Run the hidden-sample OR test"},
      {"sweep", "Run the detection experiment over a parameter grid"},
      {"verdict", "Evaluate the contiguity verdict for given inputs"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();  // global flags may follow the subcommand
    sub->add_option("-c,--config", config_path, "YAML experiment config")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ldlab::RunOverrides ov;
  if (*seed_opt) ov.seed = seed;
  if (*threads_opt) ov.threads = threads;
  if (*out_opt) ov.output_dir = out_dir;
  ov.expect_kind = ldlab::parse_experiment_kind(app.get_subcommands().front()->get_name());

  try {
    const ldlab::RunResult res = ldlab::run_config(config_path, ov);
    for (const auto& f : res.files) std::cout << (res.output_dir / f).string() << '\n';
    return 0;
  } catch (const ldlab::Error& e) {
    std::cerr << "ldlab: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "ldlab: unexpected failure: " << e.what() << '\n';
    return 1;
  }
}
