// Copyright 2026 The pfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pfsim: reproduce the simulator's reports from the command line.
//
//   pfsim braid   --out results
//   pfsim noise   --grid-step 0.05 --shots 100000 --seed 7 --format csv
//   pfsim tomo    --shots 1000000 --seed 1
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 1 anything else (I/O).

#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "pfsim/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOther = 1;

struct Options {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::int64_t shots = 0;
  double grid_step = 0.1;
  std::string out = "pfsim-out";
  std::string format = "json";
  int resamples = 100;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace pfsim;
  CLI::App app{"Z3 parafermion braiding, contextuality and tomography simulator"};
  app.set_version_flag("--version", std::string(experiments::kVersion));
  app.require_subcommand(1);

  Options opt;
  std::map<std::string, std::string> help{
      {"braid", "restricted braid matrix, Berry phases per sample state, braid process matrix"},
      {"noise", "witness M and K against flip/dephase and hopping/phase noise"},
      {"kcbs", "KCBS values, orthogonality table and self-test deficit"},
      {"witness", "nine-witness tables before and after the braid"},
      {"tomo", "process tomography of the braid and of the noise channels"},
      {"compile", "optical parts lists for the P1, R2 and P3 gates"}};
  for (const auto& id : experiments::experiment_ids()) {
    CLI::App* sub = app.add_subcommand(id, help[id]);
    auto* seed = sub->add_option("--seed", opt.seed, "seed for every stochastic draw");
    sub->add_option("--shots", opt.shots, "shots per measurement setting (0: analytic only)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--grid-step", opt.grid_step, "spacing of the noise-probability grid (must divide 1)");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--format", opt.format, "table format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--resamples", opt.resamples, "bootstrap resamples");
    sub->callback([seed, &opt]() { opt.seed_given = seed->count() > 0; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  experiments::ExperimentConfig cfg;
  cfg.experiment = app.get_subcommands().front()->get_name();
  if (opt.seed_given) cfg.seed = opt.seed;
  cfg.shots = opt.shots;
  cfg.grid_step = opt.grid_step;
  cfg.out_dir = opt.out;
  cfg.format = opt.format == "csv" ? experiments::Format::csv : experiments::Format::json;
  cfg.resamples = opt.resamples;

  try {
    const experiments::Report rep = experiments::run(cfg);
    for (const auto& f : experiments::write_report(rep, cfg)) std::cout << (cfg.out_dir / f).string() << "\n";
    return 0;
  } catch (const InvalidArgument& e) {
    std::cerr << "pfsim: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "pfsim: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "pfsim: " << e.what() << "\n";
    return kExitOther;
  }
}
