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

#include "mrea/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <spdlog/fmt/fmt.h>

#include "mrea/errors.hpp"

namespace mrea {

namespace {

namespace pt = boost::property_tree;

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

struct Section {
  std::string name;
  std::vector<Field> fields;
  std::function<bool(const RunConfig&)> present = [](const RunConfig&) { return true; };
};

std::string where(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("expected a number, got '" + text + "'");
  }
  return v;
}

unsigned long parse_unsigned(const std::string& text) {
  unsigned long v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

template <class Ref>
Field number(std::string key, Ref ref) {
  return {std::move(key), [ref](RunConfig& c, const std::string& v) { ref(c) = parse_double(v); },
          [ref](const RunConfig& c) { return fmt::format("{}", ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Field count(std::string key, Ref ref) {
  return {std::move(key),
          [ref](RunConfig& c, const std::string& v) {
            ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(parse_unsigned(v));
          },
          [ref](const RunConfig& c) { return fmt::format("{}", ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Field flag(std::string key, Ref ref) {
  return {std::move(key), [ref](RunConfig& c, const std::string& v) { ref(c) = parse_bool(v); },
          [ref](const RunConfig& c) {
            return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false");
          }};
}

template <class Ref>
Field text(std::string key, Ref ref) {
  return {std::move(key), [ref](RunConfig& c, const std::string& v) { ref(c) = v; },
          [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

template <class Get>
std::vector<Field> market_fields(Get market) {
  return {
      text("file", [market](RunConfig& c) -> std::string& { return market(c).file; }),
      text("id", [market](RunConfig& c) -> std::string& { return market(c).id; }),
      number("currency_factor", [market](RunConfig& c) -> double& { return market(c).currency_factor; }),
      text("timestamp_column", [market](RunConfig& c) -> std::string& { return market(c).columns.timestamp; }),
      text("price_column", [market](RunConfig& c) -> std::string& { return market(c).columns.price; }),
      text("buy_column", [market](RunConfig& c) -> std::string& { return market(c).columns.price_buy; }),
      text("sell_column", [market](RunConfig& c) -> std::string& { return market(c).columns.price_sell; }),
  };
}

const std::vector<Section>& schema() {
  static const std::vector<Section> sections = [] {
    std::vector<Section> s;
    s.push_back({"battery",
                 {
                     number("b_min", [](RunConfig& c) -> double& { return c.battery.b_min; }),
                     number("b_max", [](RunConfig& c) -> double& { return c.battery.b_max; }),
                     number("b0", [](RunConfig& c) -> double& { return c.battery.b0; }),
                     number("delta_min", [](RunConfig& c) -> double& { return c.battery.delta_min; }),
                     number("delta_max", [](RunConfig& c) -> double& { return c.battery.delta_max; }),
                     number("h", [](RunConfig& c) -> double& { return c.battery.h; }),
                     number("eta_ch", [](RunConfig& c) -> double& { return c.battery.eta_ch; }),
                     number("eta_dis", [](RunConfig& c) -> double& { return c.battery.eta_dis; }),
                     number("eta_conv", [](RunConfig& c) -> double& { return c.battery.eta_conv; }),
                     number("cycle_life", [](RunConfig& c) -> double& { return c.battery.cycle_life; }),
                     number("calendar_life", [](RunConfig& c) -> double& { return c.battery.calendar_life; }),
                     number("capital_cost", [](RunConfig& c) -> double& { return c.battery.capital_cost; }),
                 }});
    s.push_back({"markets",
                 {flag("forward_fill", [](RunConfig& c) -> bool& { return c.forward_fill; })}});
    s.push_back({"home", market_fields([](RunConfig& c) -> MarketSource& { return c.home; })});
    s.push_back({"remote",
                 market_fields([](RunConfig& c) -> MarketSource& {
                   if (!c.remote) c.remote.emplace();
                   return *c.remote;
                 }),
                 [](const RunConfig& c) { return c.remote.has_value(); }});
    s.push_back(
        {"interconnector",
         {
             number("l_max", [](RunConfig& c) -> double& { return c.interconnector.l_max; }),
             number("eta_line", [](RunConfig& c) -> double& { return c.interconnector.eta_line; }),
             number("rent", [](RunConfig& c) -> double& { return c.interconnector.rent; }),
             text("rent_file", [](RunConfig& c) -> std::string& { return c.interconnector.rent_file; }),
             text("rent_column", [](RunConfig& c) -> std::string& { return c.interconnector.rent_column; }),
             text("flow_file", [](RunConfig& c) -> std::string& { return c.interconnector.flow_file; }),
             text("flow_column", [](RunConfig& c) -> std::string& { return c.interconnector.flow_column; }),
             flag("use_flow_envelopes",
                  [](RunConfig& c) -> bool& { return c.interconnector.use_flow_envelopes; }),
         }});
    s.push_back(
        {"model",
         {
             {"kind", [](RunConfig& c, const std::string& v) { c.model.kind = parse_model_kind(v); },
              [](const RunConfig& c) { return std::string(to_string(c.model.kind)); }},
             number("dp_action_step", [](RunConfig& c) -> double& { return c.model.dp_action_step; }),
             number("dp_state_step", [](RunConfig& c) -> double& { return c.model.dp_state_step; }),
             flag("dp_converge", [](RunConfig& c) -> bool& { return c.model.dp_converge; }),
             number("eta_pseudo", [](RunConfig& c) -> double& { return c.model.eta_pseudo; }),
             {"cycles", [](RunConfig& c, const std::string& v) { c.model.cycles = parse_cycle_method(v); },
              [](const RunConfig& c) { return std::string(to_string(c.model.cycles)); }},
         }});
    s.push_back({"horizon",
                 {
                     count("length", [](RunConfig& c) -> std::size_t& { return c.horizon.horizon_length; }),
                     count("step", [](RunConfig& c) -> std::size_t& { return c.horizon.step; }),
                     flag("soc_chaining", [](RunConfig& c) -> bool& { return c.horizon.soc_chaining; }),
                 }});
    s.push_back({"solver",
                 {
                     number("time_limit", [](RunConfig& c) -> double& { return c.solver.time_limit; }),
                     number("mip_gap", [](RunConfig& c) -> double& { return c.solver.mip_gap; }),
                     number("feasibility_tol", [](RunConfig& c) -> double& { return c.solver.feasibility_tol; }),
                 }});
    s.push_back({"output",
                 {
                     text("directory", [](RunConfig& c) -> std::string& { return c.output.directory; }),
                     flag("export_lp", [](RunConfig& c) -> bool& { return c.output.export_lp; }),
                     flag("omit_timing", [](RunConfig& c) -> bool& { return c.output.omit_timing; }),
                     count("threads", [](RunConfig& c) -> unsigned& { return c.output.threads; }),
                     flag("continue_on_failure",
                          [](RunConfig& c) -> bool& { return c.output.continue_on_failure; }),
                 }});
    return s;
  }();
  return sections;
}

void require_file(const RunConfig& c, const std::string& key, const std::string& file) {
  if (file.empty()) throw ConfigError(key + " is required");
  const auto path = c.resolve(file);
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError(key + ": file not found: " + path.string());
  }
}

}  // namespace

std::string_view to_string(CycleMethod method) {
  return method == CycleMethod::kRainflow ? "rainflow" : "throughput";
}

CycleMethod parse_cycle_method(std::string_view text) {
  if (text == "throughput") return CycleMethod::kThroughput;
  if (text == "rainflow") return CycleMethod::kRainflow;
  throw ConfigError("unknown cycle method '" + std::string(text) +
                    "' (expected throughput or rainflow)");
}

std::filesystem::path RunConfig::resolve(const std::string& file) const {
  const std::filesystem::path p(file);
  if (p.is_absolute()) return p;
  const auto primary = base_dir.empty() ? p : base_dir / p;
  if (data_dir.empty() || std::filesystem::exists(primary)) return primary;
  return data_dir / p;
}

void RunConfig::validate() const {
  try {
    battery.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[battery] ") + e.what());
  }
  require_file(*this, where("home", "file"), home.file);
  if (home.id.empty()) throw ConfigError(where("home", "id") + " must not be empty");
  if (!(home.currency_factor > 0.0)) {
    throw ConfigError(where("home", "currency_factor") + " must be positive");
  }
  if (remote) {
    require_file(*this, where("remote", "file"), remote->file);
    if (remote->id.empty()) throw ConfigError(where("remote", "id") + " must not be empty");
    if (!(remote->currency_factor > 0.0)) {
      throw ConfigError(where("remote", "currency_factor") + " must be positive");
    }
  }
  if (model.kind == ModelKind::kMrea && !remote) {
    throw ConfigError("[model] kind = mrea needs a [remote] section");
  }
  const auto& ic = interconnector;
  if (!(ic.l_max > 0.0)) throw ConfigError(where("interconnector", "l_max") + " must be positive");
  if (!(ic.eta_line > 0.0 && ic.eta_line <= 1.0)) {
    throw ConfigError(where("interconnector", "eta_line") + " must lie in (0, 1]");
  }
  if (!(ic.rent >= 0.0)) throw ConfigError(where("interconnector", "rent") + " must be nonnegative");
  if (!ic.rent_file.empty()) require_file(*this, where("interconnector", "rent_file"), ic.rent_file);
  if (ic.use_flow_envelopes && ic.flow_file.empty()) {
    throw ConfigError("[interconnector] use_flow_envelopes = true needs flow_file");
  }
  if (!ic.flow_file.empty()) require_file(*this, where("interconnector", "flow_file"), ic.flow_file);
  if (!(model.eta_pseudo > 0.0 && model.eta_pseudo <= 1.0)) {
    throw ConfigError(where("model", "eta_pseudo") + " must lie in (0, 1]");
  }
  if (!(model.dp_action_step >= 0.0) || !(model.dp_state_step >= 0.0)) {
    throw ConfigError("[model] dp steps must be nonnegative");
  }
  try {
    horizon.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[horizon] ") + e.what());
  }
  if (!(solver.time_limit > 0.0)) throw ConfigError(where("solver", "time_limit") + " must be positive");
  if (!(solver.mip_gap >= 0.0)) throw ConfigError(where("solver", "mip_gap") + " must be nonnegative");
  if (!(solver.feasibility_tol > 0.0)) {
    throw ConfigError(where("solver", "feasibility_tol") + " must be positive");
  }
  if (output.directory.empty()) throw ConfigError(where("output", "directory") + " must not be empty");
  if (output.threads == 0) throw ConfigError(where("output", "threads") + " must be at least 1");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig config;
  config.base_dir = base_dir;
  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty()) throw ConfigError("key '" + name + "' is outside any section");
    const Section* section = nullptr;
    for (const auto& s : schema()) {
      if (s.name == name) section = &s;
    }
    if (section == nullptr) throw ConfigError("unknown section [" + name + "]");
    if (name == "remote") config.remote.emplace();
    for (const auto& [key, value] : node) {
      const Field* field = nullptr;
      for (const auto& f : section->fields) {
        if (f.key == key) field = &f;
      }
      if (field == nullptr) throw ConfigError("unknown key " + where(name, key));
      try {
        field->set(config, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(where(name, key) + ": " + e.what());
      }
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const RunConfig& config) {
  bool first = true;
  for (const auto& section : schema()) {
    if (!section.present(config)) continue;
    if (!first) out << '\n';
    first = false;
    out << '[' << section.name << "]\n";
    for (const auto& f : section.fields) out << f.key << " = " << f.get(config) << '\n';
  }
}

std::string config_to_string(const RunConfig& config) {
  std::ostringstream out;
  write_config(out, config);
  return out.str();
}

}  // namespace mrea
