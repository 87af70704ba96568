// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/traffic.hpp"

#include <stdexcept>

namespace hbfsim {

std::vector<std::uint64_t> cbr_arrivals(const TrafficSource& src, std::uint64_t t0_us,
                                        std::uint64_t t1_us) {
  if (t0_us > t1_us) throw std::invalid_argument("cbr_arrivals: t0 > t1");
  if (src.interval_us == 0) throw std::invalid_argument("cbr_arrivals: zero interval");
  std::vector<std::uint64_t> out;
  // First multiple of the interval at or after t0.
  std::uint64_t t = ((t0_us + src.interval_us - 1) / src.interval_us) * src.interval_us;
  for (; t < t1_us; t += src.interval_us) out.push_back(t);
  return out;
}

int consume_arrivals(TrafficSource& src, std::uint64_t now_us) {
  if (src.interval_us == 0) throw std::invalid_argument("consume_arrivals: zero interval");
  int n = 0;
  while (src.next_arrival_us <= now_us) {
    ++n;
    src.next_arrival_us += src.interval_us;
  }
  return n;
}

}  // namespace hbfsim
