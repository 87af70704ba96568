// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hbfsim/sim_engine.hpp"

using namespace hbfsim;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void criterion(int id, const std::string& name,
               const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, name, ok, detail, secs);
}

arma::cx_mat random_cx_mat(arma::uword r, arma::uword c, Rng& rng) {
  arma::cx_mat m(r, c);
  for (auto& v : m) v = rng.cgauss();
  return m;
}

arma::cx_mat random_well_conditioned(arma::uword n, double max_cond, Rng& rng) {
  for (;;) {
    const arma::cx_mat m = random_cx_mat(n, n, rng);
    const arma::vec sv = arma::svd(m);
    if (sv.max() / sv.min() <= max_cond) return m;
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double frac_below(const std::vector<double>& v, double threshold) {
  if (v.empty()) return 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (x < threshold) ++n;
  }
  return static_cast<double>(n) / v.size();
}

struct RunStats {
  std::vector<double> sinr_dl, sinr_ul;
  std::vector<double> bler_all;
  double outage = 0.0;       // fraction of TBs with bler >= 0.99
  double bimodal = 0.0;      // fraction in [0, 1e-2] u [0.99, 1]
  Summary summary;
};

RunStats run_config(const ScenarioConfig& cfg) {
  RunStats st;
  const auto results = run_all_drops(cfg);
  st.summary = aggregate(results);
  std::size_t outage = 0;
  std::size_t bimodal = 0;
  std::size_t total = 0;
  for (const DropResult& r : results) {
    for (const TbSample& t : r.tb_samples) {
      (t.dir == Direction::downlink ? st.sinr_dl : st.sinr_ul).push_back(t.sinr_db);
      st.bler_all.push_back(t.bler);
      ++total;
      if (t.bler >= 0.99) ++outage;
      if (t.bler <= 1e-2 || t.bler >= 0.99) ++bimodal;
    }
  }
  st.outage = total ? static_cast<double>(outage) / total : 0.0;
  st.bimodal = total ? static_cast<double>(bimodal) / total : 0.0;
  return st;
}

ScenarioConfig low_traffic_base() {
  ScenarioConfig cfg;  // defaults are the single-cell deployment under test
  apply_preset(cfg, "paper-low-traffic");
  return cfg;
}

}  // namespace

int main() {
  // Shared low-traffic runs for the SINR and BLER criteria.
  RunStats cbf1, cbf4, smbf4;
  bool shared_ready = false;
  double shared_secs = 0.0;
  const auto ensure_shared = [&]() {
    if (shared_ready) return;
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig a = low_traffic_base();
    a.n_layers = 1;
    a.bf_scheme = "cbf";
    a.scheduler = "tmrs";
    ScenarioConfig b = low_traffic_base();
    b.n_layers = 4;
    b.bf_scheme = "cbf";
    b.scheduler = "pmrs";
    ScenarioConfig c = low_traffic_base();
    c.n_layers = 4;
    c.bf_scheme = "smbf";
    c.scheduler = "pmrs";
    cbf1 = run_config(a);
    cbf4 = run_config(b);
    smbf4 = run_config(c);
    shared_ready = true;
    shared_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  criterion(1, "codebook orthonormality", [](std::string& detail) {
    double worst = 0.0;
    for (int n1 : {1, 2, 4, 8, 16}) {
      for (int n2 : {1, 2, 4, 8, 16}) {
        const Codebook cb = dft_codebook({n1, n2, kPi});
        const arma::cx_mat m = cb.as_matrix();
        const double dev =
            arma::norm(arma::cx_mat(m.t() * m) - arma::eye<arma::cx_mat>(m.n_cols, m.n_cols),
                       "fro");
        worst = std::max(worst, dev);
      }
    }
    detail = "max Frobenius deviation " + std::to_string(worst);
    return worst <= 1e-12;
  });

  criterion(2, "MMSE zero-forcing and matched-filter limits", [](std::string& detail) {
    Rng rng(2024);
    double worst_zf = 0.0, worst_mf = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const arma::cx_mat heq = random_well_conditioned(4, 20.0, rng);
      const arma::cx_mat v_zf = mmse_precoder(heq, 1e-12).v;
      worst_zf = std::max(
          worst_zf, arma::norm(arma::cx_mat(heq * v_zf) - arma::eye<arma::cx_mat>(4, 4), "fro"));
      const arma::cx_mat v_mf = mmse_precoder(heq, 1e6).v;
      const arma::cx_mat mf = heq.t();
      const double scale = arma::norm(v_mf, "fro") / arma::norm(mf, "fro");
      worst_mf = std::max(worst_mf, arma::norm(v_mf - scale * mf, "fro") /
                                        arma::norm(v_mf, "fro"));
    }
    detail = "worst ZF residual " + std::to_string(worst_zf) + ", worst MF deviation " +
             std::to_string(worst_mf);
    return worst_zf <= 1e-6 && worst_mf <= 1e-3;
  });

  criterion(3, "per-subcarrier SINR equals the brute-force recomputation",
            [](std::string& detail) {
    Rng rng(314159);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int m = 4;
      std::vector<ChannelRealization> channels(m);
      PrecoderSet ps;
      ps.dir = Direction::downlink;
      for (int u = 0; u < m; ++u) {
        channels[u].ue_id = u;
        channels[u].pathloss_db = 80.0 + 30.0 * rng.uniform();
        channels[u].grid = {1, 720e3};
        channels[u].subbands.push_back(random_cx_mat(3, 5, rng));
        ps.ues.push_back(u);
        arma::cx_vec w(3), v(5);
        for (auto& x : w) x = rng.cgauss();
        for (auto& x : v) x = rng.cgauss();
        ps.ue_beams.push_back(BeamVector::unit(w));
        ps.port_beams.push_back(BeamVector::unit(v));
      }
      std::map<int, const ChannelRealization*> chan_map;
      for (int u = 0; u < m; ++u) chan_map[u] = &channels[u];
      LinkBudget budget;
      budget.n_active_layers = m;
      const std::set<int> active{0, 1, 2, 3};

      // Oracle shared by both directions: explicit loops over the raw matrices.
      const auto heq = [](const BeamVector& w, const arma::cx_mat& h, const BeamVector& v) {
        std::complex<double> s = 0.0;
        for (arma::uword r = 0; r < h.n_rows; ++r) {
          for (arma::uword c = 0; c < h.n_cols; ++c) s += w.coeffs[r] * h(r, c) * v.coeffs[c];
        }
        return s;
      };
      for (int u = 0; u < m; ++u) {
        double des = 0.0, intf = 0.0;
        const double l_u = channels[u].linear_gain();
        for (int lp = 0; lp < m; ++lp) {
          const double rx =
              l_u * std::norm(heq(ps.ue_beams[u], channels[u].subbands[0], ps.port_beams[lp])) *
              budget.p_sc_dl_w();
          (lp == u ? des : intf) += rx;
        }
        const double oracle_dl = des / (intf + budget.noise_w());
        const double got_dl = sinr_dl(u, 0, ps, chan_map, budget, active);
        worst = std::max(worst, std::abs(got_dl - oracle_dl) / oracle_dl);

        des = intf = 0.0;
        for (int lp = 0; lp < m; ++lp) {
          const double rx = channels[lp].linear_gain() *
                            std::norm(heq(ps.ue_beams[lp], channels[lp].subbands[0],
                                          ps.port_beams[u])) *
                            budget.p_sc_ul_w();
          (lp == u ? des : intf) += rx;
        }
        const double oracle_ul = des / (intf + budget.noise_w());
        const double got_ul = sinr_ul(u, 0, ps, chan_map, budget, active);
        worst = std::max(worst, std::abs(got_ul - oracle_ul) / oracle_ul);
      }
    }
    detail = "worst relative error " + std::to_string(worst);
    return worst <= 1e-10;
  });

  ensure_shared();
  std::printf("  (shared low-traffic runs: 3 configs x 20 drops in %.1fs)\n", shared_secs);

  criterion(4, "SINR distributions across beamforming schemes", [&](std::string& detail) {
    const double med_dl_1 = median_of(cbf1.sinr_dl), med_ul_1 = median_of(cbf1.sinr_ul);
    const double med_dl_c4 = median_of(cbf4.sinr_dl), med_ul_c4 = median_of(cbf4.sinr_ul);
    const double med_dl_s4 = median_of(smbf4.sinr_dl), med_ul_s4 = median_of(smbf4.sinr_ul);
    const double tail_ul_c4 = frac_below(cbf4.sinr_ul, -10.0);
    const double tail_ul_s4 = frac_below(smbf4.sinr_ul, -10.0);

    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "median dB dl/ul: 1L-cbf %.1f/%.1f, 4L-cbf %.1f/%.1f, 4L-smbf %.1f/%.1f; "
                  "UL tail below -10 dB: cbf %.1f%%, smbf %.1f%%",
                  med_dl_1, med_ul_1, med_dl_c4, med_ul_c4, med_dl_s4, med_ul_s4,
                  100.0 * tail_ul_c4, 100.0 * tail_ul_s4);
    detail = buf;

    const bool a = std::abs(med_dl_s4 - med_dl_1) <= 3.0 && std::abs(med_ul_s4 - med_ul_1) <= 3.0;
    const bool b = med_dl_c4 <= med_dl_s4 - 5.0 && med_ul_c4 <= med_ul_s4 - 5.0;
    const bool c = tail_ul_c4 >= 0.05 && tail_ul_s4 < 0.05;
    return a && b && c;
  });

  criterion(5, "BLER bimodality and outage ordering", [&](std::string& detail) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "bimodal mass: 4L-cbf %.1f%%, 4L-smbf %.1f%%; outage mass: cbf %.2f%% vs "
                  "smbf %.2f%%",
                  100.0 * cbf4.bimodal, 100.0 * smbf4.bimodal, 100.0 * cbf4.outage,
                  100.0 * smbf4.outage);
    detail = buf;
    return cbf4.bimodal >= 0.90 && smbf4.bimodal >= 0.90 && cbf4.outage > smbf4.outage;
  });

  criterion(6, "loaded-cell throughput: single layer saturates, SDMA does not",
            [&](std::string& detail) {
    ScenarioConfig one = low_traffic_base();
    apply_preset(one, "paper-high-traffic");
    one.n_layers = 1;
    one.bf_scheme = "cbf";
    one.scheduler = "tmrs";
    ScenarioConfig four = one;
    four.n_layers = 4;
    four.bf_scheme = "smbf";
    four.scheduler = "pmrs";

    const RunStats r1 = run_config(one);
    const RunStats r4 = run_config(four);
    const double dl1 = r1.summary.dl.delivered_mbps_mean;
    const double ul1 = r1.summary.ul.delivered_mbps_mean;
    const double dl4 = r4.summary.dl.delivered_mbps_mean;
    const double ul4 = r4.summary.ul.delivered_mbps_mean;
    const double off_dl = r1.summary.dl.offered_mbps_mean;
    const double off_ul = r1.summary.ul.offered_mbps_mean;

    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "offered %.0f Mbps/dir; 1L tmrs+cbf %.0f/%.0f, 4L pmrs+smbf %.0f/%.0f "
                  "(reference values: 330/180 and 420/450)",
                  off_dl, dl1, ul1, dl4, ul4);
    detail = buf;

    const bool saturated = dl1 < 0.8 * off_dl && ul1 < 0.8 * off_ul;
    const bool gain = (dl4 + ul4) >= 1.5 * (dl1 + ul1);
    return saturated && gain;
  });

  criterion(7, "scheduler property suite", [](std::string& detail) {
    // Worked bundle arithmetic: 7 UEs over 4 layers in a 48-symbol subframe.
    {
      SchedulerState st;
      for (int u = 0; u < 7; ++u) st.attach(u);
      FrameConfig f;
      f.n_layers = 4;
      DemandMap demands;
      for (int u = 0; u < 7; ++u) demands[u][0] = DemandEntry{30, 0};
      const SubframeSchedule s = pmrs_schedule(st, demands, f);
      if (s.bundle_starts.size() != 2 || s.bundle_symbols != 24) {
        detail = "bundle arithmetic mismatch";
        return false;
      }
    }
    // Randomized demand vectors: clean validation and exact accounting.
    Rng rng(777);
    for (int trial = 0; trial < 10000; ++trial) {
      const int n_ues = 1 + static_cast<int>(rng.integer(10));
      const int n_layers = 1 + static_cast<int>(rng.integer(6));
      SchedulerState st;
      for (int u = 0; u < n_ues; ++u) st.attach(u);
      FrameConfig f;
      f.n_layers = n_layers;
      DemandMap demands;
      for (int u = 0; u < n_ues; ++u) {
        for (int d = 0; d < 2; ++d) {
          if (rng.uniform() < 0.7) {
            const int sym = static_cast<int>(rng.integer(61));
            if (sym > 0) demands[u][d] = DemandEntry{sym, 0};
          }
        }
      }
      const SubframeSchedule s = pmrs_schedule(st, demands, f);
      if (!validate_schedule(s, f).empty()) {
        detail = "validation violation at trial " + std::to_string(trial);
        return false;
      }
      if (s.total_scheduled() + s.total_padding() + s.idle_symbols(f) !=
          f.n_data_symbols() * n_layers) {
        detail = "symbol accounting mismatch at trial " + std::to_string(trial);
        return false;
      }
    }
    // RR fairness over N_b-subframe windows with persistent demand.
    {
      SchedulerState st;
      for (int u = 0; u < 7; ++u) st.attach(u);
      FrameConfig f;
      f.n_layers = 4;
      const int n_b = 2;
      std::map<int, int> last;
      for (int u = 0; u < 7; ++u) last[u] = -1;
      for (int sf = 0; sf < 60; ++sf) {
        DemandMap demands;
        for (int u = 0; u < 7; ++u) {
          demands[u][0] = DemandEntry{30, 0};
          demands[u][1] = DemandEntry{30, 0};
        }
        const SubframeSchedule s = pmrs_schedule(st, demands, f);
        for (const Allocation& a : s.allocations) last[a.ue_id] = sf;
        if (sf >= n_b) {
          for (int u = 0; u < 7; ++u) {
            if (sf - last[u] >= n_b) {
              detail = "fairness window exceeded for UE " + std::to_string(u);
              return false;
            }
          }
        }
      }
    }
    detail = "10000 random demand vectors, accounting exact, fairness window held";
    return true;
  });

  criterion(8, "frame and packet-fit arithmetic", [](std::string& detail) {
    const FrameConfig f;
    const bool slot_ok = std::abs(14 * 17.85 - 250.0) <= 0.1;
    const bool sc_ok = 275 * 12 == 3300;
    const bool fit_threshold = 12000.0 / 3300.0 < 3.64;
    const auto table = default_mcs_table();
    const bool top_fits = tb_size_bits(table.back(), 1, 3300) >= 12000;
    detail = "slot " + std::to_string(14 * 17.85) + " us, subcarriers " + std::to_string(275 * 12) +
             ", top MCS bits/symbol " + std::to_string(tb_size_bits(table.back(), 1, 3300));
    return slot_ok && sc_ok && fit_threshold && top_fits && f.n_data_symbols() == 48;
  });

  std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
