#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "freecorr/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"multi-time correlation experiments"};
  app.require_subcommand(1);

  freecorr::ExperimentConfig config;

  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", config.output, "write the result to this file");
    sub->add_option("--format", config.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* expect = app.add_subcommand("expect", "state value of a timed word");
  expect->add_option("--word", config.word, "timed word, e.g. \"e(1) e(2) e(1) e(2)\"")
      ->required();
  expect->add_option("--stream", config.stream, "bit stream spec")->required();
  add_output(expect);

  auto* cesaro = app.add_subcommand("cesaro", "time-averaged word expectation per horizon");
  cesaro->add_option("--pattern", config.pattern, "timed word whose times label the slots")
      ->required();
  cesaro->add_option("--stream", config.stream, "bit stream spec")->required();
  cesaro->add_option("--horizons", config.horizons, "horizons to sweep")
      ->required()
      ->delimiter(',');
  cesaro->add_option("--min-gap", config.min_gap, "drop grid points with closer times");
  add_output(cesaro);

  auto* law = app.add_subcommand("law", "asymptotic moment under an independence law");
  law->add_option("--law", config.law, "tensor, free, or koopman")->required();
  law->add_option("--word", config.word, "algebra word, e.g. \"A_1 B_2 C_1 D_2\"")->required();
  law->add_option("--marginals", config.marginals, "marginals file, or 'symbolic'")->required();
  add_output(law);

  auto* koopman = app.add_subcommand("koopman", "doubling-map averages vs the koopman law");
  koopman->add_option("--pattern", config.pattern, "copy pattern, e.g. 121")->required();
  koopman->add_option("--ops", config.ops, "observable files, one per position")
      ->required()
      ->delimiter(',');
  koopman->add_option("--horizons", config.horizons, "horizons to sweep")
      ->required()
      ->delimiter(',');
  koopman->add_option("--min-gap", config.min_gap, "grid separation; default: mode cutoff");
  add_output(koopman);

  auto* fluct = app.add_subcommand("fluct", "moments of the normalized fluctuation sum");
  fluct->add_option("--law", config.law, "tensor, free, koopman, or shift:<stream>")
      ->required();
  fluct->add_option("--N", config.copies, "number of summed copies")->required();
  fluct->add_option("--max-moment", config.max_moment, "highest moment order")->required();
  fluct->add_option("--horizons", config.horizons, "averaging horizon for shift mode")
      ->delimiter(',');
  fluct->add_option("--min-gap", config.min_gap, "grid separation for shift mode");
  add_output(fluct);

  auto* verify = app.add_subcommand("verify", "cross-check shift algebra against the oracle");
  verify->add_option("--words", config.words, "number of random words")->default_val(100);
  verify->add_option("--seed", config.seed, "generator seed");
  add_output(verify);

  auto* plot = app.add_subcommand("plot", "emit a gnuplot script for a result CSV");
  plot->add_option("--input", config.input, "CSV produced by cesaro or fluct")->required();
  plot->add_option("--output", config.output, "script path; default: <input>.gp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  config.subcommand = app.get_subcommands().at(0)->get_name();
  return freecorr::run(config, std::cout, std::cerr);
}
