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

// Scenario runner behind the uhlmann-lab command.

#ifndef ULAB_TOOLS_SCENARIOS_HPP
#define ULAB_TOOLS_SCENARIOS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ulab/io.hpp"
#include "ulab/random.hpp"

namespace ulab::lab {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct ScenarioConfig {
  std::string scenario;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> params;
  std::optional<Seed> seed;
  std::optional<double> tol;
  std::optional<std::size_t> trials;
  bool timing = false;
};

struct ScenarioReport {
  json doc;
  bool pass = true;
  std::string summary;
};

const std::vector<std::string>& scenario_names();

/// Throws UsageError for bad configurations and ulab errors for bad inputs.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

/// Parses "key=value".
std::pair<std::string, std::string> split_param(const std::string& kv);

}  // namespace ulab::lab

#endif  // ULAB_TOOLS_SCENARIOS_HPP
