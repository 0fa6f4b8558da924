#include "tumorpf/snapshot_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "tumorpf/errors.hpp"

namespace tumorpf {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xFFu) << (8 * (7 - b));
    return r;
  }
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::filesystem::path write_snapshot(const std::filesystem::path& dir, const std::string& scenario,
                                     const std::string& field, double t, const ScalarField& f) {
  const std::string stem = fmt::format("{}_t{:08.4f}", field, t);
  const auto raw = dir / (stem + ".f64");
  {
    std::ofstream out(raw, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + raw.string());
    std::vector<std::uint64_t> words(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) words[i] = to_little_endian(std::bit_cast<std::uint64_t>(f[i]));
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(std::uint64_t)));
  }
  nlohmann::ordered_json meta;
  meta["scenario"] = scenario;
  meta["field"] = field;
  meta["t"] = t;
  meta["dim"] = f.grid().dim();
  meta["N"] = f.grid().cells();
  meta["axis_order"] = "x_fastest";
  meta["min"] = f.min();
  meta["max"] = f.max();
  std::ofstream js(dir / (stem + ".json"), std::ios::trunc);
  js << meta.dump(2) << '\n';
  return raw;
}

SnapshotMeta read_snapshot_meta(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot read " + json_path.string());
  const auto j = nlohmann::json::parse(in);
  SnapshotMeta m;
  m.scenario = j.at("scenario").get<std::string>();
  m.field = j.at("field").get<std::string>();
  m.t = j.at("t").get<double>();
  m.dim = j.at("dim").get<int>();
  m.N = j.at("N").get<int>();
  m.axis_order = j.at("axis_order").get<std::string>();
  m.min = j.at("min").get<double>();
  m.max = j.at("max").get<double>();
  return m;
}

ScalarField read_snapshot(const std::filesystem::path& raw_path, SnapshotMeta* meta_out) {
  auto json_path = raw_path;
  json_path.replace_extension(".json");
  const SnapshotMeta meta = read_snapshot_meta(json_path);
  const GridSpec grid(meta.dim, meta.N);
  std::ifstream in(raw_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + raw_path.string());
  std::vector<std::uint64_t> words(grid.size());
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(words.size() * sizeof(std::uint64_t)));
  if (in.gcount() != static_cast<std::streamsize>(words.size() * sizeof(std::uint64_t)) || in.peek() != EOF) {
    throw std::runtime_error(fmt::format("{} does not hold {} float64 values", raw_path.string(), grid.size()));
  }
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::bit_cast<double>(to_little_endian(words[i]));
  if (meta_out) *meta_out = meta;
  return ScalarField(grid, std::move(values));
}

void write_monitors_csv(const std::filesystem::path& path, const std::vector<MonitorRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kMonitorHeader << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.phiT_max) << ','
        << format_double(r.phiT_min) << ',' << format_double(r.phiN_max) << ',' << format_double(r.theta_min)
        << ',' << format_double(r.psi_sigma_norm) << ',' << format_double(r.psi_M_norm) << ','
        << format_double(r.com_x) << '\n';
  }
}

}  // namespace tumorpf
