// Copyright 2026 The mrea Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MREA_CONFIG_HPP_
#define MREA_CONFIG_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mrea/battery.hpp"
#include "mrea/lp/solver.hpp"
#include "mrea/market_data.hpp"
#include "mrea/metrics.hpp"
#include "mrea/simulation.hpp"

namespace mrea {

struct MarketSource {
  std::string file;  // relative paths resolve against the config directory
  std::string id;
  double currency_factor = 1.0;
  CsvSchema columns;

  friend bool operator==(const MarketSource&, const MarketSource&) = default;
};

struct InterconnectorConfig {
  double l_max = 1.0;
  double eta_line = 1.0;
  double rent = 0.0;  // constant rent, used when rent_file is empty
  std::string rent_file;
  std::string rent_column = "rent";
  std::string flow_file;
  std::string flow_column = "flow";
  bool use_flow_envelopes = false;

  friend bool operator==(const InterconnectorConfig&, const InterconnectorConfig&) = default;
};

struct ModelConfig {
  ModelKind kind = ModelKind::kMrea;
  double dp_action_step = 0.0;  // 0 selects the default grid
  double dp_state_step = 0.0;
  bool dp_converge = true;
  double eta_pseudo = 1.0;
  CycleMethod cycles = CycleMethod::kThroughput;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool export_lp = false;
  bool omit_timing = false;
  unsigned threads = 1;
  bool continue_on_failure = false;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  BatteryParams battery;
  MarketSource home{"", "home", 1.0, {}};
  std::optional<MarketSource> remote;
  bool forward_fill = false;
  InterconnectorConfig interconnector;
  ModelConfig model;
  HorizonPlan horizon;
  lp::SolveOptions solver;
  OutputConfig output;
  std::filesystem::path base_dir;  // not serialized
  // Fallback for relative data files missing under base_dir. Not serialized.
  std::filesystem::path data_dir;

  std::filesystem::path resolve(const std::string& file) const;
  // Throws ConfigError naming the offending key or missing file.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// INI-style text: [section] headers, key = value lines, ';' or '#' comments.
// Unknown sections or keys are errors. Throws ConfigError.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Writes every field; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const RunConfig& config);
std::string config_to_string(const RunConfig& config);

std::string_view to_string(CycleMethod method);
CycleMethod parse_cycle_method(std::string_view text);

}  // namespace mrea

#endif  // MREA_CONFIG_HPP_
