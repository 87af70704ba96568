// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "hbfsim/sim_engine.hpp"
#include "json.hpp"

namespace hbfsim {

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << std::setprecision(10);
  return out;
}

}  // namespace

void write_outputs(const std::string& out_dir, const ScenarioConfig& cfg,
                   const std::vector<DropResult>& results, const Summary& summary) {
  {
    auto out = open_out(out_dir, "sinr_samples.csv");
    out << "time_us,ue,direction,layer,sinr_db,bler,corrupted\n";
    for (const DropResult& r : results) {
      for (const TbSample& t : r.tb_samples) {
        out << t.time_us << ',' << t.ue << ',' << dir_name(t.dir) << ',' << t.layer << ','
            << t.sinr_db << ',' << t.bler << ',' << (t.corrupted ? 1 : 0) << '\n';
      }
    }
  }
  {
    auto out = open_out(out_dir, "bler_samples.csv");
    out << "time_us,ue,direction,mcs,bler,corrupted\n";
    for (const DropResult& r : results) {
      for (const TbSample& t : r.tb_samples) {
        out << t.time_us << ',' << t.ue << ',' << dir_name(t.dir) << ',' << t.mcs_index << ','
            << t.bler << ',' << (t.corrupted ? 1 : 0) << '\n';
      }
    }
  }
  {
    auto out = open_out(out_dir, "schedule_trace.csv");
    out << "subframe,bundle,layer,ue,direction,start_symbol,n_symbols,padding_after\n";
    for (const DropResult& r : results) {
      for (const ScheduleTraceRow& row : r.schedule_trace) {
        out << row.subframe << ',' << row.bundle << ',' << row.layer << ',' << row.ue << ','
            << dir_name(row.dir) << ',' << row.start_symbol << ',' << row.n_symbols << ','
            << row.padding_after << '\n';
      }
    }
  }
  {
    auto out = open_out(out_dir, "throughput.csv");
    out << "drop,ue,direction,offered_mbps,delivered_mbps\n";
    for (const DropResult& r : results) {
      for (std::size_t u = 0; u < r.per_ue.size(); ++u) {
        for (int d = 0; d < 2; ++d) {
          const UeDirCounters& c = r.per_ue[u][d];
          out << r.drop_index << ',' << u << ','
              << dir_name(d == 0 ? Direction::downlink : Direction::uplink) << ','
              << c.offered_bits / (r.duration_ms * 1000.0) << ','
              << c.delivered_bits / (r.duration_ms * 1000.0) << '\n';
        }
      }
    }
  }
  {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config_to_json_text(cfg));
    j["n_drops"] = summary.n_drops;
    j["dl"] = {{"offered_mbps_mean", summary.dl.offered_mbps_mean},
               {"delivered_mbps_mean", summary.dl.delivered_mbps_mean},
               {"delivered_mbps_stderr", summary.dl.delivered_mbps_stderr}};
    j["ul"] = {{"offered_mbps_mean", summary.ul.offered_mbps_mean},
               {"delivered_mbps_mean", summary.ul.delivered_mbps_mean},
               {"delivered_mbps_stderr", summary.ul.delivered_mbps_stderr}};
    j["sinr_cdf_db"] = {{"dl", summary.sinr_quantiles_db_dl},
                        {"ul", summary.sinr_quantiles_db_ul}};
    j["bler_cdf"] = {{"dl", summary.bler_quantiles_dl}, {"ul", summary.bler_quantiles_ul}};
    j["padding_fraction_mean"] = summary.padding_fraction_mean;
    j["outage_fraction"] = {{"dl", summary.outage_fraction_dl},
                            {"ul", summary.outage_fraction_ul}};
    auto out = open_out(out_dir, "summary.json");
    out << j.dump(2) << '\n';
  }
}

void dump_channel_trace(const ScenarioConfig& cfg, int drop_index, const std::string& path) {
  const std::vector<std::string> errs = validate(cfg);
  if (!errs.empty()) throw std::invalid_argument("invalid scenario config: " + errs.front());

  // Mirrors the substream layout of run_drop so the dumped channels are the
  // ones the simulation would see at t = 0.
  const Rng root(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(drop_index)));
  Rng placement_rng = root.substream(1);
  const Rng pl_root = root.substream(2);
  const Rng cl_root = root.substream(3);
  const ArrayGeometry bs_geom{cfg.bs_array.n1, cfg.bs_array.n2, cfg.bs_array.phase_const};
  const ArrayGeometry ue_geom{cfg.ue_array.n1, cfg.ue_array.n2, cfg.ue_array.phase_const};
  const SubbandGrid grid = cfg.subband_grid();

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << std::setprecision(17);
  out << "drop,ue,subband,entries_row_major_re_im\n";

  std::vector<Placement> places =
      drop_ues(cfg.n_ues, cfg.disc_radius_m, cfg.bs_height_m, cfg.ue_height_m, placement_rng);
  for (int u = 0; u < cfg.n_ues; ++u) {
    Rng pl_rng = pl_root.substream(u);
    const PathlossResult pl = pathloss_uma(places[u], cfg.fc_ghz, cfg.channel.shadowing, pl_rng);
    places[u].los = pl.los;
    Rng cl_rng = cl_root.substream(u);
    const ClusterSet cs =
        generate_clusters(places[u], ue_geom, bs_geom, cfg.cluster_params(), cl_rng);
    const ChannelRealization cr = realize_channel(cs, u, pl.pathloss_db, grid, 0.0);
    for (int k = 0; k < grid.n_subbands; ++k) {
      out << drop_index << ',' << u << ',' << k;
      const arma::cx_mat& h = cr.subbands[k];
      for (arma::uword r = 0; r < h.n_rows; ++r) {
        for (arma::uword c = 0; c < h.n_cols; ++c) {
          out << ',' << h(r, c).real() << ',' << h(r, c).imag();
        }
      }
      out << '\n';
    }
  }
}

}  // namespace hbfsim
