#include "wskit/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "wskit/diag.hpp"
#include "wskit/error.hpp"

namespace wskit {

namespace {

constexpr const char* kModule = "trace_io";

// total order used everywhere a trace is sorted or merged; ties on
// (ts, channel) are broken by length so merging stays associative
auto record_key(const packet_record& r) {
  return std::make_tuple(r.ts_us, r.channel_id, r.len_bytes.value_or(-1));
}

bool record_less(const packet_record& a, const packet_record& b) {
  return record_key(a) < record_key(b);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

std::int64_t parse_i64(std::string_view field, std::size_t row) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw error(errc::parse_error, kModule,
                "malformed integer field at row " + std::to_string(row));
  return v;
}

}  // namespace

std::vector<double> iat_series::to_ms() const {
  std::vector<double> out(iats_us.size());
  for (std::size_t i = 0; i < iats_us.size(); ++i)
    out[i] = static_cast<double>(iats_us[i]) / 1000.0;
  return out;
}

packet_trace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw error(errc::parse_error, kModule, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw error(errc::parse_error, kModule, "missing header in " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  if (line != "ts_us,channel,len_bytes" && line != "ts_us,channel")
    throw error(errc::parse_error, kModule,
                "unexpected header '" + line + "' in " + path);

  packet_trace trace;
  std::size_t row = 0;
  bool sorted = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    auto fields = split_csv(line);
    if (fields.size() != 2 && fields.size() != 3)
      throw error(errc::parse_error, kModule,
                  "expected 2 or 3 fields at row " + std::to_string(row));

    packet_record rec;
    rec.ts_us = parse_i64(fields[0], row);
    if (rec.ts_us < 0)
      throw error(errc::parse_error, kModule,
                  "negative timestamp at row " + std::to_string(row));
    std::int64_t ch = parse_i64(fields[1], row);
    if (ch < 0 || ch > 14)
      throw error(errc::parse_error, kModule,
                  "channel out of range at row " + std::to_string(row));
    rec.channel_id = static_cast<int>(ch);
    if (fields.size() == 3 && !fields[2].empty()) {
      std::int64_t len = parse_i64(fields[2], row);
      if (len < 0)
        throw error(errc::parse_error, kModule,
                    "negative length at row " + std::to_string(row));
      rec.len_bytes = len;
    }
    if (!trace.records.empty() && record_less(rec, trace.records.back()))
      sorted = false;
    trace.records.push_back(rec);
    trace.source_channels.insert(rec.channel_id);
  }

  if (trace.records.empty())
    throw error(errc::empty_trace, kModule, "no records in " + path);

  if (!sorted) {
    std::stable_sort(trace.records.begin(), trace.records.end(), record_less);
    diag(diag_level::warn, kModule,
         "unsorted input sorted on load (" + std::to_string(trace.size()) +
             " records) from " + path);
  }
  return trace;
}

void write_trace_csv(const packet_trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw error(errc::parse_error, kModule, "cannot write " + path);
  out << "ts_us,channel,len_bytes\n";
  for (const auto& r : trace.records) {
    out << r.ts_us << ',' << r.channel_id << ',';
    if (r.len_bytes) out << *r.len_bytes;
    out << '\n';
  }
}

packet_trace merge_traces(const std::vector<packet_trace>& traces) {
  packet_trace out;
  for (const auto& t : traces) {
    out.records.insert(out.records.end(), t.records.begin(), t.records.end());
    out.source_channels.insert(t.source_channels.begin(),
                               t.source_channels.end());
  }
  if (out.records.empty())
    throw error(errc::empty_input, kModule, "merge needs at least one non-empty trace");
  std::stable_sort(out.records.begin(), out.records.end(), record_less);
  return out;
}

iat_series extract_iats(const packet_trace& trace) {
  if (trace.size() < 2)
    throw error(errc::too_few_records, kModule,
                "need at least 2 records to form IATs");
  iat_series s;
  s.iats_us.reserve(trace.size() - 1);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    std::int64_t d = trace.records[i].ts_us - trace.records[i - 1].ts_us;
    if (d == 0)
      ++s.merged_zero_count;
    else
      s.iats_us.push_back(d);
  }
  if (s.merged_zero_count > 0)
    diag(diag_level::info, kModule,
         "merged " + std::to_string(s.merged_zero_count) +
             " simultaneous arrivals");
  return s;
}

packet_trace window_trace(const packet_trace& trace, std::int64_t start_us,
                          std::int64_t duration_us) {
  if (duration_us <= 0)
    throw error(errc::bad_argument, kModule, "window duration must be positive");
  packet_trace out;
  out.source_channels = trace.source_channels;
  out.epoch_us = trace.epoch_us;
  auto lo = std::lower_bound(
      trace.records.begin(), trace.records.end(), start_us,
      [](const packet_record& r, std::int64_t t) { return r.ts_us < t; });
  auto hi = std::lower_bound(
      lo, trace.records.end(), start_us + duration_us,
      [](const packet_record& r, std::int64_t t) { return r.ts_us < t; });
  out.records.assign(lo, hi);
  return out;
}

}  // namespace wskit
