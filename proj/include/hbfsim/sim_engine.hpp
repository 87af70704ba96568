// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hbfsim/scenario.hpp"
#include "hbfsim/traffic.hpp"

namespace hbfsim {

/// One transport block outcome; doubles as the SINR/BLER sample stream.
struct TbSample {
  double time_us = 0.0;
  int ue = 0;
  Direction dir = Direction::downlink;
  int layer = 0;
  double sinr_db = 0.0;
  double bler = 0.0;
  bool corrupted = false;
  int mcs_index = 0;
  std::int64_t tb_bits = 0;
};

struct ScheduleTraceRow {
  int subframe = 0;
  int bundle = -1;  // -1 when nothing was bundled (TMRS)
  int layer = 0;
  int ue = 0;
  Direction dir = Direction::downlink;
  int start_symbol = 0;
  int n_symbols = 0;
  int padding_after = 0;
};

struct UeDirCounters {
  std::uint64_t offered_bits = 0;
  std::uint64_t delivered_bits = 0;
  std::uint64_t corrupted_bits = 0;
  std::uint64_t queued_bits = 0;  // left over at the end of the drop
};

struct DropResult {
  int drop_index = 0;
  double duration_ms = 0.0;
  std::vector<std::array<UeDirCounters, 2>> per_ue;  // [ue][dir]
  std::vector<TbSample> tb_samples;
  std::vector<ScheduleTraceRow> schedule_trace;
  std::uint64_t scheduled_symbols = 0;
  std::uint64_t padding_symbols = 0;
  std::uint64_t idle_symbols = 0;

  std::uint64_t offered_bits(Direction d) const;
  std::uint64_t delivered_bits(Direction d) const;
  std::uint64_t corrupted_bits(Direction d) const;
  std::uint64_t queued_bits(Direction d) const;
  double offered_mbps(Direction d) const;
  double delivered_mbps(Direction d) const;
};

/// Runs one deterministic drop: DropResult is a pure function of
/// (cfg, drop_index). Throws std::invalid_argument with field-level messages
/// when the configuration is not runnable.
DropResult run_drop(const ScenarioConfig& cfg, int drop_index);

std::vector<DropResult> run_all_drops(const ScenarioConfig& cfg);

struct DirectionSummary {
  double offered_mbps_mean = 0.0;
  double delivered_mbps_mean = 0.0;
  double delivered_mbps_stderr = 0.0;
};

struct Summary {
  int n_drops = 0;
  DirectionSummary dl, ul;
  // Empirical quantiles of the pooled per-TB samples at 1% steps (101 values);
  // empty when there are no samples for that direction.
  std::vector<double> sinr_quantiles_db_dl, sinr_quantiles_db_ul;
  std::vector<double> bler_quantiles_dl, bler_quantiles_ul;
  double padding_fraction_mean = 0.0;  // padding / (N_s * N_layers * subframes)
  double outage_fraction_dl = 0.0;     // share of TBs with bler >= 0.99
  double outage_fraction_ul = 0.0;
};

Summary aggregate(const std::vector<DropResult>& results);

/// Empirical quantiles of a sample set at 1% steps (101 values, linear
/// interpolation); empty input yields an empty vector.
std::vector<double> quantiles_percent(std::vector<double> samples);

// Output writers (files named per the external interface).
void write_outputs(const std::string& out_dir, const ScenarioConfig& cfg,
                   const std::vector<DropResult>& results, const Summary& summary);

/// Channel-trace dump: one CSV row per (drop, ue, subband) with the matrix
/// entries flattened row-major as re,im pairs. Regenerates the drop's t=0
/// channels; intended for cross-implementation comparison.
void dump_channel_trace(const ScenarioConfig& cfg, int drop_index, const std::string& path);

}  // namespace hbfsim
