#include "cfsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "cfsim/version.hpp"

namespace cfsim {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_number(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<CdfPoint> empirical_cdf(const PointRecord& point) {
  const std::size_t n = point.ue_se.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (point.ue_se[a] != point.ue_se[b]) return point.ue_se[a] < point.ue_se[b];
    return point.ue_id[a] < point.ue_id[b];
  });

  std::vector<CdfPoint> cdf;
  cdf.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cdf.push_back({point.ue_se[order[i]],
                   static_cast<double>(i + 1) / static_cast<double>(n),
                   point.ue_id[order[i]]});
  }
  return cdf;
}

void preflight_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("output directory '" + dir + "': " + ec.message());
  }
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream out(probe, std::ios::binary);
    out << "probe";
    if (!out) {
      throw IoError("output directory '" + dir + "' is not writable");
    }
  }
  fs::remove(probe, ec);
}

namespace {

std::string point_file_stem(const SweepResult& sweep, const PointRecord& rec) {
  std::string stem = "cdf_";
  if (sweep.axis == SweepAxis::None) {
    stem += "point";
  } else {
    stem += std::string(sweep_axis_name(sweep.axis)) + format_number(rec.axis_value);
  }
  stem += "_" + scheme_name(rec.scheme) + "_" + csi_mode_name(rec.csi);
  return stem;
}

void write_file(const fs::path& path, const std::string& contents,
                std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  written.push_back(path.string());
}

}  // namespace

std::vector<std::string> emit_results(const SweepResult& sweep, const RunConfig& config,
                                      const std::string& dir) {
  preflight_output_dir(dir);
  const bool want_json = std::find(config.output_formats.begin(), config.output_formats.end(),
                                   "json") != config.output_formats.end();
  const bool want_csv = std::find(config.output_formats.begin(), config.output_formats.end(),
                                  "csv") != config.output_formats.end();
  std::vector<std::string> written;

  if (want_csv) {
    for (const PointRecord& rec : sweep.points) {
      std::string body = "ue_id,scheme,csi_mode,sweep_axis,sweep_value,se_bps_hz,percentile\n";
      const std::string scheme = scheme_name(rec.scheme);
      const std::string csi = csi_mode_name(rec.csi);
      const std::string axis = sweep_axis_name(sweep.axis);
      const std::string value = format_number(rec.axis_value);
      for (const CdfPoint& p : empirical_cdf(rec)) {
        body += std::to_string(p.ue_id) + "," + scheme + "," + csi + "," + axis + "," +
                value + "," + format_number(p.value) + "," + format_number(p.percentile) +
                "\n";
      }
      write_file(fs::path(dir) / (point_file_stem(sweep, rec) + ".csv"), body, written);
    }
  }

  if (want_json) {
    json summary;
    summary["metadata"]["version"] = kVersion;
    summary["metadata"]["seed"] = config.params.master_seed;
    summary["metadata"]["config"] = json::parse(serialize_config(config));
    json points = json::array();
    for (const PointRecord& rec : sweep.points) {
      json p;
      p["sweep_axis"] = sweep_axis_name(sweep.axis);
      p["sweep_value"] = rec.axis_value;
      p["scheme"] = scheme_name(rec.scheme);
      p["csi_mode"] = csi_mode_name(rec.csi);
      p["mean_sum_se_bps_hz"] = rec.mean_sum_se;
      p["num_layouts"] = rec.num_layouts;
      p["num_ue"] = rec.num_ue;
      p["num_fading_draws"] = rec.num_fading_draws;
      p["num_se_samples"] = rec.ue_se.size();
      p["outage_total"] = rec.outage_total;
      points.push_back(std::move(p));
    }
    summary["points"] = std::move(points);
    write_file(fs::path(dir) / "summary.json", summary.dump(2) + "\n", written);
  }

  return written;
}

}  // namespace cfsim
