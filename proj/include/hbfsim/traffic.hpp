// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "hbfsim/beamforming.hpp"

namespace hbfsim {

/// Constant-bit-rate source: one packet every interval_us, strictly periodic
/// from t = 0.
struct TrafficSource {
  int ue_id = 0;
  Direction direction = Direction::downlink;
  int packet_bytes = 1500;
  std::uint64_t interval_us = 1500;
  std::uint64_t next_arrival_us = 0;
};

/// Arrival instants of `src` inside [t0_us, t1_us), independent of the
/// source's cursor.
std::vector<std::uint64_t> cbr_arrivals(const TrafficSource& src, std::uint64_t t0_us,
                                        std::uint64_t t1_us);

/// Advances the source cursor, returning the number of packets that arrived at
/// or before `now_us` and were not yet consumed.
int consume_arrivals(TrafficSource& src, std::uint64_t now_us);

}  // namespace hbfsim
