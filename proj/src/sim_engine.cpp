// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hbfsim {

namespace {

// Substream identifiers of the per-drop RNG hierarchy. Placement, pathloss,
// clusters and evolution draw from streams that do not depend on the
// scheduler or beamforming configuration, so runs that differ only in those
// settings see identical geometry and fading.
constexpr std::uint64_t kStreamPlacement = 1;
constexpr std::uint64_t kStreamPathloss = 2;
constexpr std::uint64_t kStreamClusters = 3;
constexpr std::uint64_t kStreamEvolve = 4;
constexpr std::uint64_t kStreamTb = 5;

constexpr int kBootstrapSubframe = -1000000;

struct CqiState {
  std::deque<std::pair<int, double>> reports;  // (subframe, eff sinr dB), ascending

  void record(int sf, double db, int keep) {
    reports.emplace_back(sf, db);
    while (static_cast<int>(reports.size()) > keep) reports.pop_front();
  }

  double latest(int sf, int delay) const {
    for (auto it = reports.rbegin(); it != reports.rend(); ++it) {
      if (it->first <= sf - delay) return it->second;
    }
    return reports.front().second;
  }
};

struct UeCtx {
  Placement place;
  PathlossResult pl;
  ClusterSet clusters;
  ClusterPhaseTable phases;
  Rng evolve_rng{0};
  CbfEntry cbf;
  arma::cx_mat x;  // n_subbands x n_ues: w_u^T H_u[k] v_j^CB for every UE j
  std::array<CqiState, 2> cqi;
  std::array<TrafficSource, 2> sources;
  std::array<bool, 2> has_source{false, false};
};

// One direction subset of one equal-start bundle.
struct TxGroup {
  Direction dir = Direction::downlink;
  std::vector<const Allocation*> allocs;  // in grid-layer order
};

double to_db(double lin) { return 10.0 * std::log10(std::max(lin, 1e-300)); }

}  // namespace

std::uint64_t DropResult::offered_bits(Direction d) const {
  std::uint64_t n = 0;
  for (const auto& u : per_ue) n += u[dir_index(d)].offered_bits;
  return n;
}
std::uint64_t DropResult::delivered_bits(Direction d) const {
  std::uint64_t n = 0;
  for (const auto& u : per_ue) n += u[dir_index(d)].delivered_bits;
  return n;
}
std::uint64_t DropResult::corrupted_bits(Direction d) const {
  std::uint64_t n = 0;
  for (const auto& u : per_ue) n += u[dir_index(d)].corrupted_bits;
  return n;
}
std::uint64_t DropResult::queued_bits(Direction d) const {
  std::uint64_t n = 0;
  for (const auto& u : per_ue) n += u[dir_index(d)].queued_bits;
  return n;
}
double DropResult::offered_mbps(Direction d) const {
  return static_cast<double>(offered_bits(d)) / (duration_ms * 1000.0);
}
double DropResult::delivered_mbps(Direction d) const {
  return static_cast<double>(delivered_bits(d)) / (duration_ms * 1000.0);
}

DropResult run_drop(const ScenarioConfig& cfg, int drop_index) {
  {
    const std::vector<std::string> errs = validate(cfg);
    if (!errs.empty()) {
      std::string msg = "invalid scenario config:";
      for (const std::string& e : errs) msg += "\n  " + e;
      throw std::invalid_argument(msg);
    }
  }

  const ArrayGeometry bs_geom{cfg.bs_array.n1, cfg.bs_array.n2, cfg.bs_array.phase_const};
  const ArrayGeometry ue_geom{cfg.ue_array.n1, cfg.ue_array.n2, cfg.ue_array.phase_const};
  const Codebook tx_cb = dft_codebook(bs_geom);
  const Codebook rx_cb = dft_codebook(ue_geom);
  const SubbandGrid grid = cfg.subband_grid();
  const FrameConfig frame = cfg.frame();
  const int n_sb = grid.n_subbands;
  const int k_ref = cfg.k_ref();
  const int n_ues = cfg.n_ues;
  const std::vector<McsEntry> mcs_table = default_mcs_table(cfg.mcs_gap_db);
  const auto strategy = make_strategy(cfg.bf_scheme);
  const ClusterParams cl_prm = cfg.cluster_params();
  const double rho = coherence_rho(1e-3, cfg.channel.t_coh_ms * 1e-3);
  const int cqi_keep = cfg.cqi_delay_subframes + 4;

  const Rng root(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(drop_index)));
  Rng placement_rng = root.substream(kStreamPlacement);
  Rng tb_rng = root.substream(kStreamTb);

  std::vector<UeCtx> ue(n_ues);
  {
    std::vector<Placement> places =
        drop_ues(n_ues, cfg.disc_radius_m, cfg.bs_height_m, cfg.ue_height_m, placement_rng);
    const Rng pl_root = root.substream(kStreamPathloss);
    const Rng cl_root = root.substream(kStreamClusters);
    const Rng ev_root = root.substream(kStreamEvolve);
    for (int u = 0; u < n_ues; ++u) {
      ue[u].place = places[u];
      Rng pl_rng = pl_root.substream(u);
      ue[u].pl = pathloss_uma(ue[u].place, cfg.fc_ghz, cfg.channel.shadowing, pl_rng);
      ue[u].place.los = ue[u].pl.los;
      Rng cl_rng = cl_root.substream(u);
      ue[u].clusters = generate_clusters(ue[u].place, ue_geom, bs_geom, cl_prm, cl_rng);
      ue[u].phases = make_phase_table(ue[u].clusters, grid);
      ue[u].evolve_rng = ev_root.substream(u);
      for (Direction d : {Direction::downlink, Direction::uplink}) {
        if (d == Direction::uplink && !cfg.traffic.symmetric) continue;
        TrafficSource src;
        src.ue_id = u;
        src.direction = d;
        src.packet_bytes = cfg.traffic.packet_bytes;
        src.interval_us = cfg.traffic.interval_us;
        ue[u].sources[dir_index(d)] = src;
        ue[u].has_source[dir_index(d)] = true;
      }
    }
  }

  SchedulerState st;
  for (int u = 0; u < n_ues; ++u) st.attach(u);

  DropResult res;
  res.drop_index = drop_index;
  res.duration_ms = cfg.duration_ms;
  res.per_ue.assign(n_ues, {});

  const double noise_w = cfg.link_budget(1).noise_w();

  for (int sf = 0; sf < cfg.duration_ms; ++sf) {
    // Block fading: gains evolve between subframes, frozen within one.
    if (sf > 0) {
      for (int u = 0; u < n_ues; ++u) evolve_gains(ue[u].clusters, rho, ue[u].evolve_rng);
    }

    // Max-SNR codebook pair per UE at the reference subband, then the
    // cross-table of effective channels against every UE's selected BS beam.
    for (int u = 0; u < n_ues; ++u) {
      const arma::cx_mat pair_gains =
          beam_pair_gains(ue[u].clusters, ue[u].phases, rx_cb, tx_cb, k_ref);
      const BeamPairChoice c = cbf_argmax(pair_gains);
      ue[u].cbf.rx_index = static_cast<int>(c.rx);
      ue[u].cbf.tx_index = static_cast<int>(c.tx);
      ue[u].cbf.rx_beam = rx_cb.at(c.rx);
      ue[u].cbf.tx_beam = tx_cb.at(c.tx);
      ue[u].cbf.gain = c.gain;
    }
    std::vector<BeamVector> all_tx;
    all_tx.reserve(n_ues);
    for (int u = 0; u < n_ues; ++u) all_tx.push_back(ue[u].cbf.tx_beam);
    for (int u = 0; u < n_ues; ++u) {
      ue[u].x = project_clusters(ue[u].clusters, ue[u].phases, ue[u].cbf.rx_beam, all_tx);
    }

    if (sf == 0) {
      // Idle single-layer measurement seeds the CQI chain (SSB/CSI-RS style:
      // own beam, no interference).
      const LinkBudget boot = cfg.link_budget(1);
      for (int u = 0; u < n_ues; ++u) {
        const double l_u = std::pow(10.0, -ue[u].pl.pathloss_db / 10.0);
        arma::vec snr_dl(n_sb), snr_ul(n_sb);
        for (int k = 0; k < n_sb; ++k) {
          const double g = l_u * std::norm(ue[u].x(k, u));
          snr_dl[k] = g * boot.p_sc_dl_w() / noise_w;
          snr_ul[k] = g * boot.p_sc_ul_w() / noise_w;
        }
        const arma::vec w1(n_sb, arma::fill::ones);
        ue[u].cqi[0].record(kBootstrapSubframe,
                            to_db(effective_sinr_weighted(snr_dl, w1, cfg.eesm_beta)), cqi_keep);
        ue[u].cqi[1].record(kBootstrapSubframe,
                            to_db(effective_sinr_weighted(snr_ul, w1, cfg.eesm_beta)), cqi_keep);
      }
    }

    // Traffic arrivals up to and including the subframe start; later arrivals
    // wait for the next demand snapshot.
    const std::uint64_t now_us = static_cast<std::uint64_t>(sf) * 1000;
    for (int u = 0; u < n_ues; ++u) {
      for (int d = 0; d < 2; ++d) {
        if (!ue[u].has_source[d]) continue;
        const int n_pkts = consume_arrivals(ue[u].sources[d], now_us);
        const std::uint64_t bits =
            static_cast<std::uint64_t>(n_pkts) * 8ull * cfg.traffic.packet_bytes;
        st.queue_bits[u][d] += bits;
        res.per_ue[u][d].offered_bits += bits;
      }
    }

    // Demand snapshot with the delayed-CQI MCS per (UE, direction).
    DemandMap demands;
    std::vector<std::array<McsSelection, 2>> mcs_now(n_ues);
    for (int u = 0; u < n_ues; ++u) {
      for (int d = 0; d < 2; ++d) {
        mcs_now[u][d] =
            select_mcs(ue[u].cqi[d].latest(sf, cfg.cqi_delay_subframes), mcs_table);
        const std::uint64_t q = st.queue_bits[u][d];
        if (q == 0) continue;
        demands[u][d].symbols =
            demand_symbols((q + 7) / 8, mcs_now[u][d].entry, cfg.n_subcarriers());
        demands[u][d].mcs_index = mcs_now[u][d].entry.index;
      }
    }

    const SubframeSchedule sched = cfg.scheduler == "pmrs" ? pmrs_schedule(st, demands, frame)
                                                           : tmrs_schedule(st, demands, frame);
    res.scheduled_symbols += sched.total_scheduled();
    res.padding_symbols += sched.total_padding();
    res.idle_symbols += sched.idle_symbols(frame);

    for (const Allocation& a : sched.allocations) {
      ScheduleTraceRow row;
      row.subframe = sf;
      row.bundle = -1;
      for (std::size_t b = 0; b < sched.bundle_starts.size(); ++b) {
        if (sched.bundle_starts[b] == a.start_symbol) row.bundle = static_cast<int>(b);
      }
      row.layer = a.layer;
      row.ue = a.ue_id;
      row.dir = a.dir;
      row.start_symbol = a.start_symbol;
      row.n_symbols = a.n_symbols;
      row.padding_after = sched.bundle_symbols > 0 ? sched.bundle_symbols - a.n_symbols : 0;
      res.schedule_trace.push_back(row);
    }

    // Equal starts partition the subframe into concurrent units.
    std::map<int, std::vector<const Allocation*>> units;
    for (const Allocation& a : sched.allocations) units[a.start_symbol].push_back(&a);

    for (const auto& [start, allocs] : units) {
      std::array<TxGroup, 2> groups;
      groups[0].dir = Direction::downlink;
      groups[1].dir = Direction::uplink;
      for (const Allocation* a : allocs) groups[dir_index(a->dir)].allocs.push_back(a);

      for (TxGroup& g : groups) {
        if (g.allocs.empty()) continue;
        const int m = static_cast<int>(g.allocs.size());
        std::vector<int> g_ues(m);
        std::vector<CbfEntry> g_cbf(m);
        std::vector<double> g_lin(m);
        std::vector<int> g_len(m);
        for (int i = 0; i < m; ++i) {
          g_ues[i] = g.allocs[i]->ue_id;
          g_cbf[i] = ue[g_ues[i]].cbf;
          g_lin[i] = std::pow(10.0, -ue[g_ues[i]].pl.pathloss_db / 10.0);
          g_len[i] = g.allocs[i]->n_symbols;
        }
        const LinkBudget budget =
            cfg.link_budget(g.dir == Direction::downlink ? m : 1);
        const double p_sc =
            g.dir == Direction::downlink ? budget.p_sc_dl_w() : budget.p_sc_ul_w();
        const double noise_ratio = noise_w / p_sc;

        // Group equivalent channel straight from the cross-table.
        const auto heq_at = [&](int k) {
          arma::cx_mat heq(m, m);
          for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
              heq(i, j) = std::sqrt(g_lin[i]) * ue[g_ues[i]].x(k, g_ues[j]);
            }
          }
          return heq;
        };
        const PrecoderSet ps =
            strategy->design(g.dir, g_ues, g_cbf, heq_at, n_sb, noise_ratio);

        // Effective gains e(k)[i][j]: UE i's channel into layer j's beam.
        arma::cx_cube eff(m, m, n_sb);
        for (int k = 0; k < n_sb; ++k) {
          arma::cx_mat xsub(m, m);
          for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) xsub(i, j) = ue[g_ues[i]].x(k, g_ues[j]);
          }
          if (ps.mix.is_empty()) {
            eff.slice(k) = xsub;
          } else {
            arma::cx_mat e = xsub * ps.mix_at(k);
            for (int j = 0; j < m; ++j) e.col(j) /= ps.norm_at(k, j);
            eff.slice(k) = e;
          }
        }

        // Per-TB effective SINR over the allocation's symbols and subbands;
        // the active layer set shrinks as shorter co-allocations end.
        std::vector<int> ends(g_len);
        std::sort(ends.begin(), ends.end());
        ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

        for (int i = 0; i < m; ++i) {
          const Allocation& a = *g.allocs[i];
          std::vector<double> gammas;
          std::vector<double> weights;
          gammas.reserve(ends.size() * n_sb);
          weights.reserve(ends.size() * n_sb);
          int prev = 0;
          for (int end : ends) {
            if (prev >= g_len[i]) break;
            const int hi = std::min(end, g_len[i]);
            const int seg = hi - prev;
            if (seg <= 0) continue;
            std::vector<int> active;
            for (int j = 0; j < m; ++j) {
              if (g_len[j] > prev) active.push_back(j);
            }
            for (int k = 0; k < n_sb; ++k) {
              const arma::cx_mat& e = eff.slice(k);
              double des = 0.0, intf = 0.0;
              if (g.dir == Direction::downlink) {
                des = g_lin[i] * std::norm(e(i, i)) * p_sc;
                for (int j : active) {
                  if (j != i) intf += g_lin[i] * std::norm(e(i, j)) * p_sc;
                }
              } else {
                des = g_lin[i] * std::norm(e(i, i)) * p_sc;
                for (int j : active) {
                  if (j != i) intf += g_lin[j] * std::norm(e(j, i)) * p_sc;
                }
              }
              gammas.push_back(des / (intf + noise_w));
              weights.push_back(seg);
            }
            prev = hi;
          }
          const double gamma_eff = effective_sinr_weighted(
              arma::vec(gammas), arma::vec(weights), cfg.eesm_beta);
          const double eff_db = to_db(gamma_eff);

          const McsEntry& mcs = mcs_table.at(a.mcs_index);
          TransportBlockResult tb =
              tb_verdict(eff_db, mcs, cfg.bler_slope_db, cfg.bler_margin_db, tb_rng);
          tb.ue_id = a.ue_id;
          tb.direction = a.dir;
          tb.tb_bits = tb_size_bits(mcs, a.n_symbols, cfg.n_subcarriers());

          auto& q = st.queue_bits[a.ue_id][dir_index(a.dir)];
          const std::uint64_t drain = std::min<std::uint64_t>(q, tb.tb_bits);
          q -= drain;
          auto& counters = res.per_ue[a.ue_id][dir_index(a.dir)];
          if (tb.corrupted) {
            counters.corrupted_bits += drain;
          } else {
            counters.delivered_bits += drain;
          }

          TbSample sample;
          sample.time_us = sf * 1000.0 + a.start_symbol * cfg.symbol_duration_us;
          sample.ue = a.ue_id;
          sample.dir = a.dir;
          sample.layer = a.layer;
          sample.sinr_db = eff_db;
          sample.bler = tb.bler;
          sample.corrupted = tb.corrupted;
          sample.mcs_index = mcs.index;
          sample.tb_bits = tb.tb_bits;
          res.tb_samples.push_back(sample);

          ue[a.ue_id].cqi[dir_index(a.dir)].record(sf, eff_db, cqi_keep);
        }
      }
    }
  }

  for (int u = 0; u < n_ues; ++u) {
    for (int d = 0; d < 2; ++d) res.per_ue[u][d].queued_bits = st.queue_bits[u][d];
  }
  return res;
}

std::vector<DropResult> run_all_drops(const ScenarioConfig& cfg) {
  std::vector<DropResult> out;
  out.reserve(cfg.n_drops);
  for (int d = 0; d < cfg.n_drops; ++d) out.push_back(run_drop(cfg, d));
  return out;
}

std::vector<double> quantiles_percent(std::vector<double> samples) {
  if (samples.empty()) return {};
  std::sort(samples.begin(), samples.end());
  std::vector<double> q(101);
  const double n = static_cast<double>(samples.size());
  for (int p = 0; p <= 100; ++p) {
    const double pos = (p / 100.0) * (n - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min<std::size_t>(lo + 1, samples.size() - 1);
    const double frac = pos - lo;
    q[p] = samples[lo] * (1.0 - frac) + samples[hi] * frac;
  }
  return q;
}

Summary aggregate(const std::vector<DropResult>& results) {
  if (results.empty()) throw std::invalid_argument("aggregate: no drop results");
  Summary s;
  s.n_drops = static_cast<int>(results.size());

  const auto dir_summary = [&](Direction d) {
    DirectionSummary ds;
    std::vector<double> thr;
    for (const DropResult& r : results) {
      ds.offered_mbps_mean += r.offered_mbps(d);
      thr.push_back(r.delivered_mbps(d));
    }
    ds.offered_mbps_mean /= results.size();
    ds.delivered_mbps_mean = std::accumulate(thr.begin(), thr.end(), 0.0) / thr.size();
    if (thr.size() > 1) {
      double var = 0.0;
      for (double t : thr) var += (t - ds.delivered_mbps_mean) * (t - ds.delivered_mbps_mean);
      var /= (thr.size() - 1);
      ds.delivered_mbps_stderr = std::sqrt(var / thr.size());
    }
    return ds;
  };
  s.dl = dir_summary(Direction::downlink);
  s.ul = dir_summary(Direction::uplink);

  std::array<std::vector<double>, 2> sinr, bler;
  std::array<std::uint64_t, 2> outages{0, 0}, counts{0, 0};
  double pad_frac = 0.0;
  for (const DropResult& r : results) {
    for (const TbSample& t : r.tb_samples) {
      const int d = dir_index(t.dir);
      sinr[d].push_back(t.sinr_db);
      bler[d].push_back(t.bler);
      counts[d]++;
      if (t.bler >= 0.99) outages[d]++;
    }
    const std::uint64_t grid = r.scheduled_symbols + r.padding_symbols + r.idle_symbols;
    pad_frac += grid > 0 ? static_cast<double>(r.padding_symbols) / grid : 0.0;
  }
  s.sinr_quantiles_db_dl = quantiles_percent(sinr[0]);
  s.sinr_quantiles_db_ul = quantiles_percent(sinr[1]);
  s.bler_quantiles_dl = quantiles_percent(bler[0]);
  s.bler_quantiles_ul = quantiles_percent(bler[1]);
  s.outage_fraction_dl = counts[0] ? static_cast<double>(outages[0]) / counts[0] : 0.0;
  s.outage_fraction_ul = counts[1] ? static_cast<double>(outages[1]) / counts[1] : 0.0;
  s.padding_fraction_mean = pad_frac / results.size();
  return s;
}

}  // namespace hbfsim
