#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "specq/scenario.hpp"

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("SPECQ_OUT"); env && *env) return env;
  return "out";
}

void print_issues(const std::vector<specq::ValidationIssue>& issues) {
  for (const specq::ValidationIssue& issue : issues)
    std::cerr << (issue.pointer.empty() ? std::string("<document>") : issue.pointer) << ": "
              << issue.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of quotient- and locally bounded operators on calibrated spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = default_out_dir();
  app.add_option("--out", out_dir, "Output directory (default $SPECQ_OUT or ./out)")
      ->capture_default_str();

  std::optional<double> tol_radius, tol_neumann, relax_zero;
  std::optional<int> max_terms;
  app.add_option("--tol-radius", tol_radius, "Override the radius tolerance");
  app.add_option("--tol-neumann", tol_neumann, "Override the Neumann series tolerance");
  app.add_option("--max-terms", max_terms, "Override the series term cap");
  app.add_option("--relax-zero", relax_zero,
                 "Treat off-support entries up to this magnitude as structural zeros");

  std::string scenario_path;
  CLI::App* run = app.add_subcommand("run", "Run every task in a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  CLI::App* validate = app.add_subcommand("validate", "Validate a scenario file");
  validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  std::string kind;
  int gen_n = 0;
  std::uint64_t seed = 1;
  CLI::App* generate = app.add_subcommand("generate", "Emit a seeded scenario file");
  generate
      ->add_option("kind", kind,
                   "One of triangular-nested | diagonal | shift | random-invariant")
      ->required();
  generate->add_option("n", gen_n, "Space dimension (1..500)")->required();
  generate->add_option("--seed", seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      specq::Json doc = specq::generate_scenario(kind, gen_n, seed);
      std::filesystem::create_directories(out_dir);
      std::filesystem::path path =
          std::filesystem::path(out_dir) / (doc["name"].get<std::string>() + ".json");
      specq::write_text_file(path.string(), doc.dump(2) + "\n");
      std::cout << path.string() << "\n";
      return 0;
    }

    specq::ParseResult parsed = specq::load_scenario(scenario_path);
    if (!parsed.ok()) {
      print_issues(parsed.issues);
      return 2;
    }
    if (validate->parsed()) {
      std::cout << "ok\n";
      return 0;
    }

    specq::RunOptions options;
    options.tol_radius = tol_radius;
    options.tol_neumann = tol_neumann;
    options.zero_relax = relax_zero;
    options.max_terms = max_terms;
    specq::RunResult result = specq::run_scenario(*parsed.scenario, out_dir, options);
    for (const specq::TaskOutcome& outcome : result.outcomes) {
      std::printf("task %03d %-14s %s", outcome.index, outcome.type.c_str(),
                  outcome.ok ? "ok" : "FAIL");
      if (!outcome.error.empty()) std::printf("  (%s)", outcome.error.c_str());
      std::printf("\n");
    }
    return result.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
