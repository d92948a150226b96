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

#include "mrea/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include <spdlog/spdlog.h>

#include "mrea/errors.hpp"

namespace mrea {

namespace {

using namespace std::chrono;

int read_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
  int v = 0;
  if (pos + len > s.size()) throw InvalidArgument("malformed timestamp '" + std::string(whole) + "'");
  const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc() || ptr != s.data() + pos + len) {
    throw InvalidArgument("malformed timestamp '" + std::string(whole) + "'");
  }
  return v;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;
  char delimiter = ',';

  std::optional<std::size_t> column(const std::string& name) const {
    const std::string key = lower(name);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (lower(header[c]) == key) return c;
    }
    return std::nullopt;
  }
};

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == delimiter && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

CsvTable read_table(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty() || line.front() == '#') continue;
    if (table.header.empty()) {
      const auto semicolons = std::count(line.begin(), line.end(), ';');
      const auto commas = std::count(line.begin(), line.end(), ',');
      table.delimiter = semicolons > commas ? ';' : ',';
      table.header = split(line, table.delimiter);
      continue;
    }
    auto fields = split(line, table.delimiter);
    if (fields.size() != table.header.size()) {
      throw ParseError("line " + std::to_string(number) + ": expected " +
                           std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       number);
    }
    table.rows.push_back(std::move(fields));
    table.lines.push_back(number);
  }
  if (table.header.empty()) throw ParseError("empty file: no header row", 0);
  return table;
}

double parse_value(std::string text, char delimiter, std::size_t line) {
  if (delimiter == ';') std::replace(text.begin(), text.end(), ',', '.');
  std::string_view v = text;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ParseError("line " + std::to_string(line) + ": invalid number '" + text + "'", line);
  }
  return out;
}

Timestamp parse_stamp(const std::string& text, std::size_t line) {
  try {
    return parse_iso8601(text);
  } catch (const InvalidArgument& e) {
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
  }
}

// Checks ordering and spacing of stamps parsed from a file and, when allowed,
// fills missing slots by repeating the previous row. `columns` are filled in
// lockstep with the stamps.
void check_spacing(std::vector<Timestamp>& stamps, std::vector<std::vector<double>*> columns,
                   bool forward_fill, LoadReport* report) {
  if (stamps.size() < 2) return;
  seconds step = stamps[1] - stamps[0];
  for (std::size_t i = 2; i < stamps.size(); ++i) step = std::min(step, stamps[i] - stamps[i - 1]);
  std::vector<std::string> problems;
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    const seconds gap = stamps[i] - stamps[i - 1];
    if (gap <= seconds{0}) {
      problems.push_back(format_iso8601(stamps[i]) +
                         (gap == seconds{0} ? " (duplicated)" : " (out of order)"));
    } else if (gap % step != seconds{0}) {
      problems.push_back(format_iso8601(stamps[i]) + " (irregular spacing)");
    }
  }
  if (!problems.empty()) {
    throw GapError("timestamps are not strictly increasing with uniform spacing", problems);
  }
  std::vector<std::string> missing;
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    for (Timestamp t = stamps[i - 1] + step; t < stamps[i]; t += step) {
      missing.push_back(format_iso8601(t));
    }
  }
  if (missing.empty()) return;
  if (!forward_fill) {
    throw GapError(std::to_string(missing.size()) + " missing interval(s), first at " +
                       missing.front(),
                   missing);
  }
  spdlog::warn("forward-filling {} missing interval(s), first at {}", missing.size(),
               missing.front());
  std::vector<Timestamp> filled_stamps{stamps.front()};
  std::vector<std::vector<double>> filled(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) filled[c].push_back((*columns[c])[0]);
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    for (Timestamp t = stamps[i - 1] + step; t < stamps[i]; t += step) {
      filled_stamps.push_back(t);
      for (std::size_t c = 0; c < columns.size(); ++c) filled[c].push_back((*columns[c])[i - 1]);
      if (report) report->filled.push_back(t);
    }
    filled_stamps.push_back(stamps[i]);
    for (std::size_t c = 0; c < columns.size(); ++c) filled[c].push_back((*columns[c])[i]);
  }
  stamps = std::move(filled_stamps);
  for (std::size_t c = 0; c < columns.size(); ++c) *columns[c] = std::move(filled[c]);
}

std::size_t require_column(const CsvTable& table, const std::string& name) {
  const auto c = table.column(name);
  if (!c) throw ParseError("missing column '" + name + "'", 1);
  return *c;
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  const std::string s = trim(text);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') {
    throw InvalidArgument("malformed timestamp '" + s + "'");
  }
  const year_month_day ymd{year{read_int(s, 0, 4, s)},
                           month{static_cast<unsigned>(read_int(s, 5, 2, s))},
                           day{static_cast<unsigned>(read_int(s, 8, 2, s))}};
  if (!ymd.ok()) throw InvalidArgument("invalid date in timestamp '" + s + "'");
  seconds time_of_day{0};
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    const int hh = read_int(s, pos + 1, 2, s);
    if (pos + 3 >= s.size() || s[pos + 3] != ':') throw InvalidArgument("malformed timestamp '" + s + "'");
    const int mm = read_int(s, pos + 4, 2, s);
    pos += 6;
    int ss = 0;
    if (pos < s.size() && s[pos] == ':') {
      ss = read_int(s, pos + 1, 2, s);
      pos += 3;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
    }
    if (hh > 24 || mm > 59 || ss > 60 || (hh == 24 && (mm != 0 || ss != 0))) {
      throw InvalidArgument("invalid time in timestamp '" + s + "'");
    }
    time_of_day = hours{hh} + minutes{mm} + seconds{ss};
  }
  seconds offset{0};
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      pos = s.size();
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
      const int oh = read_int(s, pos + 1, 2, s);
      const int om = read_int(s, pos + 4, 2, s);
      offset = hours{oh} + minutes{om};
      if (s[pos] == '-') offset = -offset;
      pos = s.size();
    } else {
      throw InvalidArgument("malformed timestamp '" + s + "'");
    }
  }
  return sys_days{ymd} + time_of_day - offset;
}

std::string format_iso8601(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<seconds> tod{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf;
}

seconds PriceSeries::spacing() const {
  if (timestamps.size() < 2) return hours{1};
  return timestamps[1] - timestamps[0];
}

std::optional<std::size_t> PriceSeries::index_of(Timestamp t) const {
  const auto it = std::lower_bound(timestamps.begin(), timestamps.end(), t);
  if (it == timestamps.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - timestamps.begin());
}

PriceSeries PriceSeries::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > size()) {
    throw InvalidArgument("slice [" + std::to_string(begin) + ", " +
                          std::to_string(begin + count) + ") exceeds series '" + market_id +
                          "' of length " + std::to_string(size()));
  }
  PriceSeries out;
  out.market_id = market_id;
  const auto b = static_cast<std::ptrdiff_t>(begin);
  const auto e = static_cast<std::ptrdiff_t>(begin + count);
  out.timestamps.assign(timestamps.begin() + b, timestamps.begin() + e);
  out.buy.assign(buy.begin() + b, buy.begin() + e);
  out.sell.assign(sell.begin() + b, sell.begin() + e);
  return out;
}

void PriceSeries::validate() const {
  if (buy.size() != timestamps.size() || sell.size() != timestamps.size()) {
    throw LengthMismatch("series '" + market_id + "': " + std::to_string(timestamps.size()) +
                         " stamps, " + std::to_string(buy.size()) + " buy and " +
                         std::to_string(sell.size()) + " sell prices");
  }
  std::vector<std::string> problems;
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    const auto gap = timestamps[i] - timestamps[i - 1];
    if (gap <= seconds{0} || gap != spacing()) problems.push_back(format_iso8601(timestamps[i]));
  }
  if (!problems.empty()) {
    throw GapError("series '" + market_id + "' is not uniformly spaced", problems);
  }
  for (std::size_t i = 0; i < buy.size(); ++i) {
    if (!std::isfinite(buy[i]) || !std::isfinite(sell[i])) {
      throw DataError("series '" + market_id + "' has a non-finite price at index " +
                      std::to_string(i));
    }
  }
}

PriceSeries PriceSeries::hourly(std::string market_id, std::vector<double> buy,
                                std::vector<double> sell, Timestamp start) {
  PriceSeries out;
  out.market_id = std::move(market_id);
  if (sell.empty()) sell = buy;
  for (std::size_t i = 0; i < buy.size(); ++i) {
    out.timestamps.push_back(start + hours{static_cast<long>(i)});
  }
  out.buy = std::move(buy);
  out.sell = std::move(sell);
  return out;
}

void InterconnectorSpec::validate() const {
  if (!(l_max > 0.0)) throw InvalidArgument("interconnector l_max must be positive");
  if (!(eta_line > 0.0 && eta_line <= 1.0)) {
    throw InvalidArgument("interconnector eta_line must lie in (0, 1]");
  }
  for (std::size_t i = 0; i < rent.size(); ++i) {
    if (!(rent[i] >= 0.0)) {
      throw InvalidArgument("interconnector rent must be nonnegative (index " +
                            std::to_string(i) + ")");
    }
  }
  const double tol = 1e-9 * std::max(1.0, l_max);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (!(std::abs(flow[i]) <= l_max + tol)) {
      throw InvalidArgument("interconnector flow " + std::to_string(flow[i]) +
                            " exceeds l_max at index " + std::to_string(i));
    }
  }
}

InterconnectorSpec InterconnectorSpec::slice(std::size_t begin, std::size_t count) const {
  InterconnectorSpec out = *this;
  auto cut = [&](std::vector<double>& v, const char* what) {
    if (v.empty()) return;
    if (begin + count > v.size()) {
      throw InvalidArgument(std::string("interconnector ") + what + " series too short");
    }
    v = std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(begin),
                            v.begin() + static_cast<std::ptrdiff_t>(begin + count));
  };
  cut(out.rent, "rent");
  cut(out.flow, "flow");
  return out;
}

EffectivePrices effective_prices(const PriceSeries& remote, const InterconnectorSpec& ic) {
  const std::size_t n = remote.size();
  if (remote.buy.size() != n || remote.sell.size() != n ||
      (!ic.rent.empty() && ic.rent.size() != n)) {
    throw LengthMismatch("effective prices: series '" + remote.market_id + "' has " +
                         std::to_string(n) + " intervals, rent has " +
                         std::to_string(ic.rent.size()));
  }
  EffectivePrices out;
  out.buy.resize(n);
  out.sell.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rent = ic.rent_at(i);
    out.buy[i] = (remote.buy[i] + rent) / ic.eta_line;
    out.sell[i] = (remote.sell[i] - rent) * ic.eta_line;
  }
  return out;
}

RampBounds adjusted_envelope(const RampBounds& bounds, const InterconnectorSpec& ic,
                             std::size_t i, double h) {
  const double flow = ic.flow_at(i);
  RampBounds out = bounds;
  if (flow < 0.0) {
    out.x_max = std::max(0.0, std::min(bounds.x_max, h * (ic.l_max + flow)));
  } else {
    out.x_min = std::min(0.0, std::max(bounds.x_min, h * (-ic.l_max + flow)));
  }
  return out;
}

NegativePriceStats negative_price_stats(const PriceSeries& prices) {
  if (prices.buy.empty()) throw InvalidArgument("negative price statistics of an empty series");
  NegativePriceStats out;
  out.hours = static_cast<std::size_t>(
      std::count_if(prices.buy.begin(), prices.buy.end(), [](double p) { return p < 0.0; }));
  out.fraction = static_cast<double>(out.hours) / static_cast<double>(prices.buy.size());
  return out;
}

PriceSeries read_prices(std::istream& in, const CsvSchema& schema, const LoadOptions& options,
                        LoadReport* report) {
  if (!(options.currency_factor > 0.0)) throw InvalidArgument("currency factor must be positive");
  const CsvTable table = read_table(in);
  const std::size_t ts = require_column(table, schema.timestamp);
  const auto single = table.column(schema.price);
  std::size_t buy_col = 0, sell_col = 0;
  if (single) {
    buy_col = sell_col = *single;
  } else {
    buy_col = require_column(table, schema.price_buy);
    sell_col = require_column(table, schema.price_sell);
  }
  PriceSeries out;
  out.market_id = options.market_id;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.lines[r];
    out.timestamps.push_back(parse_stamp(row[ts], line));
    out.buy.push_back(parse_value(row[buy_col], table.delimiter, line) * options.currency_factor);
    out.sell.push_back(parse_value(row[sell_col], table.delimiter, line) * options.currency_factor);
  }
  if (report) report->rows = table.rows.size();
  check_spacing(out.timestamps, {&out.buy, &out.sell}, options.forward_fill, report);
  return out;
}

PriceSeries load_prices(const std::filesystem::path& path, const CsvSchema& schema,
                        const LoadOptions& options, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open price file '" + path.string() + "'");
  try {
    return read_prices(in, schema, options, report);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  } catch (const GapError& e) {
    throw GapError(path.string() + ": " + e.what(), e.locations());
  }
}

TimeSeries read_series(std::istream& in, const std::string& value_column, bool forward_fill,
                       LoadReport* report) {
  const CsvTable table = read_table(in);
  const std::size_t ts = require_column(table, "timestamp");
  const std::size_t vc = require_column(table, value_column);
  TimeSeries out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out.timestamps.push_back(parse_stamp(table.rows[r][ts], table.lines[r]));
    out.values.push_back(parse_value(table.rows[r][vc], table.delimiter, table.lines[r]));
  }
  if (report) report->rows = table.rows.size();
  check_spacing(out.timestamps, {&out.values}, forward_fill, report);
  return out;
}

TimeSeries load_series(const std::filesystem::path& path, const std::string& value_column,
                       bool forward_fill, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file '" + path.string() + "'");
  try {
    return read_series(in, value_column, forward_fill, report);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  } catch (const GapError& e) {
    throw GapError(path.string() + ": " + e.what(), e.locations());
  }
}

std::vector<double> align(const TimeSeries& series, const PriceSeries& prices) {
  std::vector<double> out;
  out.reserve(prices.size());
  std::size_t k = 0;
  for (Timestamp t : prices.timestamps) {
    while (k < series.timestamps.size() && series.timestamps[k] < t) ++k;
    if (k == series.timestamps.size() || series.timestamps[k] != t) {
      throw DataGap("no value for " + format_iso8601(t) + " in the aligned series");
    }
    out.push_back(series.values[k]);
  }
  return out;
}

}  // namespace mrea
