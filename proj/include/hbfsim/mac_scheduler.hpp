// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hbfsim/beamforming.hpp"
#include "hbfsim/phy_abstraction.hpp"

namespace hbfsim {

/// NR-like TDD frame: 14-symbol slots, first and last symbol of each slot
/// reserved for PDCCH/PUCCH, everything in between flexible data.
struct FrameConfig {
  int symbols_per_slot = 14;
  int slots_per_subframe = 4;
  double symbol_duration_us = 17.85;
  int n_layers = 1;
  int first_data_symbol = 1;  // symbol 0 carries the PDCCH
  int last_data_symbol = 12;  // symbol 13 carries the PUCCH

  int data_symbols_per_slot() const { return last_data_symbol - first_data_symbol + 1; }
  int n_data_symbols() const { return data_symbols_per_slot() * slots_per_subframe; }  // N_s
  int n_symbols() const { return symbols_per_slot * slots_per_subframe; }
  double slot_duration_us() const { return symbols_per_slot * symbol_duration_us; }

  bool is_data_symbol(int global) const {
    const int pos = global % symbols_per_slot;
    return pos >= first_data_symbol && pos <= last_data_symbol;
  }
  // Position of a global symbol in the subframe's data-symbol sequence
  // (control symbols are skipped); -1 for control symbols.
  int data_index(int global) const {
    if (global < 0 || global >= n_symbols() || !is_data_symbol(global)) return -1;
    const int slot = global / symbols_per_slot;
    return slot * data_symbols_per_slot() + (global % symbols_per_slot - first_data_symbol);
  }
  int global_symbol(int data_idx) const {
    const int per_slot = data_symbols_per_slot();
    return (data_idx / per_slot) * symbols_per_slot + first_data_symbol + data_idx % per_slot;
  }
};

void validate_frame(const FrameConfig& frame);

/// One transmission: a UE on one layer, starting at a subframe-global symbol
/// and consuming n_symbols data symbols (control symbols are skipped, so the
/// occupied symbols may wrap across slot boundaries in data-index space).
struct Allocation {
  int ue_id = -1;
  int layer = 0;
  Direction dir = Direction::downlink;
  int start_symbol = 0;  // subframe-global index; must be a data symbol
  int n_symbols = 0;     // data symbols consumed, >= 1
  int mcs_index = 0;
};

struct SubframeSchedule {
  std::vector<Allocation> allocations;
  std::vector<int> padding_per_layer;  // wasted symbols between an allocation's
                                       // end and the next bundle start
  std::vector<int> bundle_starts;      // global symbol of each bundle start (empty for TMRS)
  int bundle_symbols = 0;              // N_a; 0 when nothing was bundled

  int total_scheduled() const;
  int total_padding() const;
  // N_s * N_layers minus scheduled and padding.
  int idle_symbols(const FrameConfig& frame) const;
};

/// Round-robin state across subframes. Queues are kept in bits; direction
/// preference per UE alternates between its service opportunities.
struct SchedulerState {
  std::vector<int> rr_queue;
  std::map<int, std::array<std::uint64_t, 2>> queue_bits;  // [ue][dir]
  std::map<int, Direction> next_dir;

  void attach(int ue);
  std::uint64_t queued(int ue, Direction d) const;
};

/// Symbols needed to drain a byte queue at a given MCS; 0 for an empty queue.
int demand_symbols(std::uint64_t queue_bytes, const McsEntry& mcs, int n_subcarriers);

/// Per-UE, per-direction demand snapshot handed to the schedulers.
struct DemandEntry {
  int symbols = 0;
  int mcs_index = 0;
};
using DemandMap = std::map<int, std::array<DemandEntry, 2>>;

/// Padded multi-user round-robin: splits the subframe into N_b = ceil(Nu/Nl)
/// bundles of N_a = floor(Ns/N_b) data symbols; every allocation in a bundle
/// starts at the bundle's first symbol and is truncated to N_a, the remainder
/// of the bundle counting as padding. A UE with traffic in both directions is
/// served by separate consecutive bundles, alternating which direction goes
/// first across its service opportunities. UEs that obtained no allocation
/// move to the head of the queue for the next subframe.
SubframeSchedule pmrs_schedule(SchedulerState& st, const DemandMap& demands,
                               const FrameConfig& frame);

/// Single-layer sequential round-robin baseline; fills data symbols in queue
/// order with no padding. The first UE whose demand was cut short resumes at
/// the head of the queue next subframe.
SubframeSchedule tmrs_schedule(SchedulerState& st, const DemandMap& demands,
                               const FrameConfig& frame);

struct ScheduleViolation {
  enum class Code {
    overlap,
    unequal_start,
    control_symbol,
    out_of_range,
    bundle_misaligned,
    padding_mismatch,
    accounting,
  };
  Code code;
  std::string detail;
};

/// Violations are data, not exceptions: empty iff all schedule invariants hold.
std::vector<ScheduleViolation> validate_schedule(const SubframeSchedule& s,
                                                 const FrameConfig& frame);

}  // namespace hbfsim
