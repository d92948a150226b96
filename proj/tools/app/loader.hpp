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

#ifndef MREA_TOOLS_APP_LOADER_HPP_
#define MREA_TOOLS_APP_LOADER_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "mrea/config.hpp"
#include "mrea/market_data.hpp"
#include "mrea/simulation.hpp"

namespace mrea::app {

enum class FlowScenario { kNone, kRecorded, kReversed };

std::string_view to_string(FlowScenario flow);
// Accepts none, file (or recorded) and reversed. Throws ConfigError.
FlowScenario parse_flow(std::string_view text);

// Half-open time range; empty bounds mean the start or end of the data.
struct DateRange {
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
};

// Whole UTC days: [first 00:00, last + 1 day 00:00). Dates are YYYY-MM-DD.
DateRange day_range(const std::string& first, const std::string& last);

// Loads the configured markets and interconnector series restricted to the
// range. Remote data is loaded only when the config names a remote market.
// Throws DataError subclasses for missing or misaligned data.
BacktestData load_data(const RunConfig& config, const DateRange& range, FlowScenario flow);

}  // namespace mrea::app

#endif  // MREA_TOOLS_APP_LOADER_HPP_
