#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wskit {

// One captured (or synthesized) frame arrival. Timestamps are integer
// microseconds from the trace origin; channel 0 is reserved for synthetic
// traces, real captures use 1..14.
struct packet_record {
  std::int64_t ts_us = 0;
  int channel_id = 0;
  std::optional<std::int64_t> len_bytes;
};

struct packet_trace {
  std::vector<packet_record> records;  // sorted by (ts_us, channel_id, len)
  std::set<int> source_channels;
  std::int64_t epoch_us = 0;  // informational absolute origin

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
  std::int64_t span_us() const {
    return records.size() < 2 ? 0 : records.back().ts_us - records.front().ts_us;
  }
};

struct iat_series {
  std::vector<std::int64_t> iats_us;
  std::size_t merged_zero_count = 0;  // simultaneous arrivals collapsed

  std::size_t count() const { return iats_us.size(); }
  std::vector<double> to_ms() const;
};

// CSV format: header "ts_us,channel,len_bytes" (len column optional), one
// record per row. Unsorted rows are sorted on load with a warning on stderr.
packet_trace load_trace_csv(const std::string& path);
void write_trace_csv(const packet_trace& trace, const std::string& path);

// Multiset union ordered by (ts_us, channel_id, len); associative.
packet_trace merge_traces(const std::vector<packet_trace>& traces);

// Consecutive differences; zero gaps (same-microsecond arrivals) are merged
// and counted so one jammed instant doesn't read as many zero IATs.
iat_series extract_iats(const packet_trace& trace);

// Records with start_us <= ts < start_us + duration_us. Empty result is valid.
packet_trace window_trace(const packet_trace& trace, std::int64_t start_us,
                          std::int64_t duration_us);

}  // namespace wskit
