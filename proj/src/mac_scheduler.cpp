// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/mac_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hbfsim {

void validate_frame(const FrameConfig& frame) {
  if (frame.symbols_per_slot < 3 || frame.slots_per_subframe < 1 || frame.n_layers < 1) {
    throw std::invalid_argument("FrameConfig: bad slot/layer dimensions");
  }
  if (frame.first_data_symbol < 0 || frame.last_data_symbol >= frame.symbols_per_slot ||
      frame.first_data_symbol > frame.last_data_symbol) {
    throw std::invalid_argument("FrameConfig: bad data symbol range");
  }
}

int SubframeSchedule::total_scheduled() const {
  int n = 0;
  for (const Allocation& a : allocations) n += a.n_symbols;
  return n;
}

int SubframeSchedule::total_padding() const {
  int n = 0;
  for (int p : padding_per_layer) n += p;
  return n;
}

int SubframeSchedule::idle_symbols(const FrameConfig& frame) const {
  return frame.n_data_symbols() * frame.n_layers - total_scheduled() - total_padding();
}

void SchedulerState::attach(int ue) {
  rr_queue.push_back(ue);
  queue_bits[ue] = {0, 0};
  next_dir[ue] = Direction::downlink;
}

std::uint64_t SchedulerState::queued(int ue, Direction d) const {
  const auto it = queue_bits.find(ue);
  return it == queue_bits.end() ? 0 : it->second[dir_index(d)];
}

int demand_symbols(std::uint64_t queue_bytes, const McsEntry& mcs, int n_subcarriers) {
  if (queue_bytes == 0) return 0;
  const auto bits_per_symbol =
      static_cast<std::uint64_t>(std::floor(mcs.spectral_eff * n_subcarriers + 1e-9));
  if (bits_per_symbol == 0) throw std::invalid_argument("demand_symbols: zero-rate MCS");
  const std::uint64_t bits = 8 * queue_bytes;
  return static_cast<int>((bits + bits_per_symbol - 1) / bits_per_symbol);
}

namespace {

struct DirRequest {
  int ue;
  Direction dir;
  int symbols;
  int mcs_index;
};

// Direction requests of one UE, preferred direction first.
std::vector<DirRequest> ue_requests(int ue, const std::array<DemandEntry, 2>& demand,
                                    Direction preferred) {
  std::vector<DirRequest> reqs;
  const auto add = [&](Direction d) {
    const DemandEntry& e = demand[dir_index(d)];
    if (e.symbols > 0) reqs.push_back({ue, d, e.symbols, e.mcs_index});
  };
  add(preferred);
  add(opposite(preferred));
  return reqs;
}

}  // namespace

SubframeSchedule pmrs_schedule(SchedulerState& st, const DemandMap& demands,
                               const FrameConfig& frame) {
  validate_frame(frame);
  const int n_s = frame.n_data_symbols();
  const int n_l = frame.n_layers;

  SubframeSchedule sched;
  sched.padding_per_layer.assign(n_l, 0);

  std::vector<int> demanding;
  for (int ue : st.rr_queue) {
    const auto it = demands.find(ue);
    if (it == demands.end()) continue;
    if (it->second[0].symbols > 0 || it->second[1].symbols > 0) demanding.push_back(ue);
  }
  if (demanding.empty()) return sched;

  const int n_b = std::min<int>((static_cast<int>(demanding.size()) + n_l - 1) / n_l, n_s);
  const int n_a = n_s / n_b;
  sched.bundle_symbols = n_a;
  sched.bundle_starts.resize(n_b);
  for (int b = 0; b < n_b; ++b) sched.bundle_starts[b] = frame.global_symbol(b * n_a);

  std::vector<int> fill(n_b, 0);  // occupied layers per bundle
  std::set<int> served;
  for (int ue : demanding) {
    const auto reqs = ue_requests(ue, demands.at(ue), st.next_dir[ue]);
    int prev_bundle = -1;
    for (const DirRequest& r : reqs) {
      // A UE's two directions go to separate, consecutive bundles so that it
      // never occupies two layers of the same bundle.
      int bundle = -1;
      for (int b = prev_bundle + 1; b < n_b; ++b) {
        if (fill[b] < n_l) {
          bundle = b;
          break;
        }
      }
      if (bundle < 0) break;
      const int layer = fill[bundle]++;
      const int len = std::min(r.symbols, n_a);
      Allocation a;
      a.ue_id = r.ue;
      a.layer = layer;
      a.dir = r.dir;
      a.start_symbol = frame.global_symbol(bundle * n_a);
      a.n_symbols = len;
      a.mcs_index = r.mcs_index;
      sched.allocations.push_back(a);
      sched.padding_per_layer[layer] += n_a - len;
      served.insert(ue);
      st.next_dir[ue] = opposite(r.dir);
      prev_bundle = bundle;
    }
  }

  // Unserved-but-demanding UEs become the head of the list next subframe.
  std::vector<int> next_queue;
  for (int ue : st.rr_queue) {
    if (served.find(ue) == served.end() &&
        std::find(demanding.begin(), demanding.end(), ue) != demanding.end()) {
      next_queue.push_back(ue);
    }
  }
  for (int ue : st.rr_queue) {
    if (std::find(next_queue.begin(), next_queue.end(), ue) == next_queue.end()) {
      next_queue.push_back(ue);
    }
  }
  st.rr_queue = std::move(next_queue);
  return sched;
}

SubframeSchedule tmrs_schedule(SchedulerState& st, const DemandMap& demands,
                               const FrameConfig& frame) {
  validate_frame(frame);
  if (frame.n_layers != 1) {
    throw std::invalid_argument("tmrs_schedule: requires a single layer");
  }
  const int n_s = frame.n_data_symbols();

  SubframeSchedule sched;
  sched.padding_per_layer.assign(1, 0);

  std::set<int> touched;   // received at least one allocation
  std::set<int> shorted;   // demanding, and some demand was left unserved
  int cursor = 0;
  for (int ue : st.rr_queue) {
    const auto it = demands.find(ue);
    if (it == demands.end()) continue;
    const auto reqs = ue_requests(ue, it->second, st.next_dir.count(ue) ? st.next_dir[ue]
                                                                        : Direction::downlink);
    if (reqs.empty()) continue;
    for (const DirRequest& r : reqs) {
      const int len = std::min(r.symbols, n_s - cursor);
      if (len <= 0) {
        shorted.insert(ue);
        continue;
      }
      Allocation a;
      a.ue_id = r.ue;
      a.layer = 0;
      a.dir = r.dir;
      a.start_symbol = frame.global_symbol(cursor);
      a.n_symbols = len;
      a.mcs_index = r.mcs_index;
      sched.allocations.push_back(a);
      cursor += len;
      touched.insert(ue);
      st.next_dir[ue] = opposite(r.dir);
      if (len < r.symbols) shorted.insert(ue);
    }
  }

  // Resume order: never-served demanding UEs first, then cut-short ones, then
  // everyone satisfied.
  std::vector<int> next_queue;
  const auto push_if = [&](auto pred) {
    for (int ue : st.rr_queue) {
      if (std::find(next_queue.begin(), next_queue.end(), ue) == next_queue.end() && pred(ue)) {
        next_queue.push_back(ue);
      }
    }
  };
  push_if([&](int ue) { return shorted.count(ue) > 0 && touched.count(ue) == 0; });
  push_if([&](int ue) { return shorted.count(ue) > 0; });
  push_if([&](int) { return true; });
  st.rr_queue = std::move(next_queue);
  return sched;
}

std::vector<ScheduleViolation> validate_schedule(const SubframeSchedule& s,
                                                 const FrameConfig& frame) {
  using Code = ScheduleViolation::Code;
  std::vector<ScheduleViolation> out;
  const auto add = [&](Code c, std::string msg) { out.push_back({c, std::move(msg)}); };
  const int n_s = frame.n_data_symbols();

  if (static_cast<int>(s.padding_per_layer.size()) != frame.n_layers) {
    add(Code::accounting, "padding_per_layer size does not match the layer count");
  }

  struct Range {
    int lo, hi, layer, start_symbol;
  };
  std::vector<Range> ranges;
  for (std::size_t i = 0; i < s.allocations.size(); ++i) {
    const Allocation& a = s.allocations[i];
    const std::string tag = "allocation " + std::to_string(i);
    if (a.layer < 0 || a.layer >= frame.n_layers) {
      add(Code::out_of_range, tag + ": layer " + std::to_string(a.layer));
      continue;
    }
    if (a.n_symbols < 1) {
      add(Code::out_of_range, tag + ": n_symbols " + std::to_string(a.n_symbols));
      continue;
    }
    const int di = frame.data_index(a.start_symbol);
    if (di < 0) {
      add(Code::control_symbol,
          tag + ": starts on control symbol " + std::to_string(a.start_symbol));
      continue;
    }
    if (di + a.n_symbols > n_s) {
      add(Code::out_of_range, tag + ": extends past the subframe");
      continue;
    }
    ranges.push_back({di, di + a.n_symbols, a.layer, a.start_symbol});
  }

  for (std::size_t i = 0; i < ranges.size(); ++i) {
    for (std::size_t j = i + 1; j < ranges.size(); ++j) {
      const Range& x = ranges[i];
      const Range& y = ranges[j];
      const bool intersect = x.lo < y.hi && y.lo < x.hi;
      if (!intersect) continue;
      if (x.layer == y.layer) {
        add(Code::overlap, "allocations " + std::to_string(i) + " and " + std::to_string(j) +
                               " overlap on layer " + std::to_string(x.layer));
      }
      if (x.lo != y.lo) {
        add(Code::unequal_start, "allocations " + std::to_string(i) + " and " + std::to_string(j) +
                                     " overlap with different start symbols");
      }
    }
  }

  if (!s.bundle_starts.empty()) {
    std::vector<int> pad(frame.n_layers, 0);
    std::set<int> starts(s.bundle_starts.begin(), s.bundle_starts.end());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const Range& r = ranges[i];
      if (starts.find(r.start_symbol) == starts.end()) {
        add(Code::bundle_misaligned,
            "allocation " + std::to_string(i) + " does not start at a bundle boundary");
        continue;
      }
      if (r.hi - r.lo > s.bundle_symbols) {
        add(Code::bundle_misaligned, "allocation " + std::to_string(i) + " exceeds the bundle");
        continue;
      }
      pad[r.layer] += s.bundle_symbols - (r.hi - r.lo);
    }
    if (out.empty() && pad != s.padding_per_layer) {
      add(Code::padding_mismatch, "recorded padding does not match the allocations");
    }
  } else {
    if (s.total_padding() != 0) {
      add(Code::padding_mismatch, "padding recorded without bundles");
    }
  }

  if (s.idle_symbols(frame) < 0) {
    add(Code::accounting, "scheduled plus padding exceeds the symbol grid");
  }
  return out;
}

}  // namespace hbfsim
