// Copyright 2026 The uhlmann-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// uhlmann-lab <scenario> [flags] <inputs...>
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
// or input errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "scenarios.hpp"

using namespace ulab;

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale experiments around the Uhlmann transformation problem", "uhlmann-lab"};
  lab::ScenarioConfig cfg;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::size_t trials = 0;
  std::string out_path;
  std::vector<std::string> params;

  app.add_option("scenario", cfg.scenario, "Scenario to run")
      ->required()
      ->check(CLI::IsMember(lab::scenario_names()));
  app.add_option("inputs", cfg.inputs, "Input files or builtin names");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every random choice");
  auto* tol_opt = app.add_option("--tol", tol, "Tolerance for equality checks");
  auto* trials_opt = app.add_option("--trials", trials, "Monte-Carlo trials or sample count");
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--param", params, "Scenario parameter key=value (repeatable)")
      ->allow_extra_args(false);
  app.add_flag("--timing", cfg.timing, "Include wall-clock time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) cfg.seed = seed;
  if (*tol_opt) cfg.tol = tol;
  if (*trials_opt) cfg.trials = trials;

  lab::ScenarioReport rep;
  try {
    for (const auto& kv : params) {
      auto [k, v] = lab::split_param(kv);
      if (cfg.params.count(k)) throw lab::UsageError("parameter '" + k + "' given twice");
      cfg.params[k] = v;
    }
    rep = lab::run_scenario(cfg);
  } catch (const Error& e) {
    std::cerr << "uhlmann-lab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "uhlmann-lab: " << e.what() << "\n";
    return 2;
  }

  const std::string text = rep.doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!(f << text)) {
      std::cerr << "uhlmann-lab: cannot write " << out_path << "\n";
      return 2;
    }
  }
  std::cerr << rep.summary << "\n";
  return rep.pass ? 0 : 1;
}
