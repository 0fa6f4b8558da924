#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tumorpf/grid.hpp"
#include "tumorpf/scenario.hpp"

namespace tumorpf {

// Raw little-endian float64 array, x fastest, plus a JSON sidecar
//   {scenario, field, t, dim, N, axis_order, min, max}.
struct SnapshotMeta {
  std::string scenario;
  std::string field;
  double t = 0.0;
  int dim = 2;
  int N = 0;
  std::string axis_order = "x_fastest";
  double min = 0.0;
  double max = 0.0;
};

// Writes <dir>/<field>_t<t>.f64 and .json, returns the .f64 path.
std::filesystem::path write_snapshot(const std::filesystem::path& dir, const std::string& scenario,
                                     const std::string& field, double t, const ScalarField& f);

SnapshotMeta read_snapshot_meta(const std::filesystem::path& json_path);
ScalarField read_snapshot(const std::filesystem::path& raw_path, SnapshotMeta* meta = nullptr);

inline constexpr const char* kMonitorHeader = "step,t,phiT_max,phiT_min,phiN_max,theta_min,psi_sigma_norm,psi_M_norm,com_x";

void write_monitors_csv(const std::filesystem::path& path, const std::vector<MonitorRow>& rows);

// %.17g, so values survive a text round trip.
std::string format_double(double v);

}  // namespace tumorpf
