#pragma once

// Serialization: GRPD grid binaries, JSON sidecars for distributions,
// cone sets and estimator reports (JSON plus a CSV slope table).
//
// GRPD layout (little-endian): "GRPD", u32 rank, rank x u32 dims, then
// float64 (re, im) pairs in row-major order.

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grpd/cone.hpp"
#include "grpd/distribution.hpp"
#include "grpd/errors.hpp"
#include "grpd/wavefront.hpp"

namespace grpd {

namespace fs = std::filesystem;

struct Grid {
  std::vector<std::uint32_t> dims;
  std::vector<cd> data;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  if (pos + bytes > in.size()) throw FormatError("GRPD: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string encode_grid(const Grid& g) {
  std::size_t total = 1;
  for (auto d : g.dims) total *= d;
  if (total != g.data.size()) throw FormatError("GRPD: dims do not match data length");
  std::string out = "GRPD";
  detail::put_u32(out, static_cast<std::uint32_t>(g.dims.size()));
  for (auto d : g.dims) detail::put_u32(out, d);
  for (const auto& c : g.data) {
    detail::put_f64(out, c.real());
    detail::put_f64(out, c.imag());
  }
  return out;
}

inline Grid decode_grid(const std::string& in) {
  if (in.size() < 8 || in.compare(0, 4, "GRPD") != 0) throw FormatError("GRPD: bad magic");
  Grid g;
  const auto rank = static_cast<std::uint32_t>(detail::get_le(in, 4, 4));
  if (rank == 0 || rank > 8) throw FormatError("GRPD: bad rank");
  std::size_t pos = 8, total = 1;
  for (std::uint32_t i = 0; i < rank; ++i, pos += 4) {
    g.dims.push_back(static_cast<std::uint32_t>(detail::get_le(in, pos, 4)));
    total *= g.dims.back();
  }
  if (in.size() != pos + 16 * total) throw FormatError("GRPD: payload length does not match dims");
  g.data.resize(total);
  for (std::size_t i = 0; i < total; ++i, pos += 16)
    g.data[i] = cd{std::bit_cast<double>(detail::get_le(in, pos, 8)), std::bit_cast<double>(detail::get_le(in, pos + 8, 8))};
  return g;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + p.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("write failed for " + p.string());
}

inline void write_grid(const fs::path& p, const Grid& g) { write_file(p, encode_grid(g)); }
inline Grid read_grid(const fs::path& p) { return decode_grid(read_file(p)); }

inline Grid grid_of(const Distribution& u) {
  Grid g;
  for (int d : grid_dims(u.model)) g.dims.push_back(static_cast<std::uint32_t>(d));
  g.data = to_dense(u);
  return g;
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Distributions: JSON sidecar (model, flags, layers) + optional smooth grid.

inline nlohmann::json complex_array(const std::vector<cd>& v) {
  auto a = nlohmann::json::array();
  for (const auto& c : v) a.push_back({c.real(), c.imag()});
  return a;
}

inline std::vector<cd> complex_vector(const nlohmann::json& a) {
  std::vector<cd> v;
  for (const auto& c : a) v.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  return v;
}

inline nlohmann::json distribution_sidecar(const Distribution& u, const std::string& smooth_file) {
  nlohmann::json j;
  j["model"] = u.model;
  j["label"] = u.label;
  j["r_transversal"] = u.r_transversal;
  j["s_transversal"] = u.s_transversal;
  j["smooth"] = u.has_smooth() ? nlohmann::json(smooth_file) : nlohmann::json(nullptr);
  auto layers = nlohmann::json::array();
  for (const auto& l : u.layers)
    layers.push_back({{"section", l.section}, {"order", l.order}, {"coeffs", complex_array(l.coeffs)}});
  j["layers"] = layers;
  return j;
}

/// Writes <dir>/<stem>.json and, if u has a smooth part, <dir>/<stem>.grpd.
inline void save_distribution(const fs::path& dir, const std::string& stem, const Distribution& u) {
  const std::string grid_name = stem + ".grpd";
  if (u.has_smooth()) {
    Grid g;
    for (int d : grid_dims(u.model)) g.dims.push_back(static_cast<std::uint32_t>(d));
    g.data = u.smooth;
    write_grid(dir / grid_name, g);
  }
  write_file(dir / (stem + ".json"), dump_json(distribution_sidecar(u, grid_name)));
}

inline Distribution load_distribution(const fs::path& json_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(json_path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("distribution sidecar: ") + e.what());
  }
  Distribution u;
  u.model = j.at("model").get<GroupoidModel>();
  u.label = j.value("label", "");
  u.r_transversal = j.value("r_transversal", true);
  u.s_transversal = j.value("s_transversal", true);
  if (!j.at("smooth").is_null()) {
    const Grid g = read_grid(json_path.parent_path() / j.at("smooth").get<std::string>());
    u.smooth = g.data;
    check_grid(u.model, u.smooth, "smooth part");
  }
  for (const auto& jl : j.at("layers"))
    u.layers.push_back(Layer{jl.at("section").get<long long>(), complex_vector(jl.at("coeffs")), jl.at("order").get<int>()});
  return u;
}

// ---------------------------------------------------------------------------
// Estimator reports

inline nlohmann::json params_json(const WfParams& p) {
  return {{"window_radius", p.window_radius},     {"window_sigma", p.window_sigma},
          {"n_directions", p.n_directions},       {"sector_half_width", p.sector_half_width},
          {"shell_lo", p.shell_lo},               {"shell_hi", p.shell_hi},
          {"slope_threshold", p.slope_threshold}, {"probe_stride", p.probe_stride},
          {"pad", p.pad},                         {"noise_floor", p.noise_floor},
          {"dynamic_range", p.dynamic_range}};
}

inline WfParams params_from_json(const nlohmann::json& j, WfParams p) {
  p.window_radius = j.value("window_radius", p.window_radius);
  p.window_sigma = j.value("window_sigma", p.window_sigma);
  p.n_directions = j.value("n_directions", p.n_directions);
  p.sector_half_width = j.value("sector_half_width", kPi / p.n_directions);
  p.shell_lo = j.value("shell_lo", p.shell_lo);
  p.shell_hi = j.value("shell_hi", p.shell_hi);
  p.slope_threshold = j.value("slope_threshold", p.slope_threshold);
  p.probe_stride = j.value("probe_stride", p.probe_stride);
  p.pad = j.value("pad", p.pad);
  p.noise_floor = j.value("noise_floor", p.noise_floor);
  p.dynamic_range = j.value("dynamic_range", p.dynamic_range);
  p.validate();
  return p;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV: center_0[,center_1],direction,angle,slope
inline std::string slopes_csv(const WfReport& r) {
  std::string out;
  const int rank = r.slopes.empty() ? 0 : static_cast<int>(r.slopes.front().center.size());
  out += rank == 2 ? "center_x,center_y" : "center_x";
  out += ",direction,angle,slope\n";
  const double step = r.params.angular_step();
  for (const auto& row : r.slopes) {
    for (int c : row.center) out += std::to_string(c) + ",";
    const double angle = rank == 1 ? (row.direction == 0 ? 0.0 : kPi) : row.direction * step;
    out += std::to_string(row.direction) + "," + format_double(angle) + "," + format_double(row.slope) + "\n";
  }
  return out;
}

inline std::vector<SlopeRow> parse_slopes_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("slope CSV: missing header");
  const int rank = line.rfind("center_x,center_y", 0) == 0 ? 2 : 1;
  std::vector<SlopeRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (static_cast<int>(f.size()) != rank + 3) throw FormatError("slope CSV: bad row");
    SlopeRow r;
    for (int i = 0; i < rank; ++i) r.center.push_back(std::stoi(f[i]));
    r.direction = std::stoi(f[rank]);
    r.slope = std::strtod(f[rank + 2].c_str(), nullptr);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json report_json(const WfReport& r, const std::string& csv_name) {
  return {{"estimated", r.estimated}, {"params", params_json(r.params)}, {"slopes_csv", csv_name}};
}

/// Writes <dir>/<stem>.json and <dir>/<stem>_slopes.csv.
inline void save_report(const fs::path& dir, const std::string& stem, const WfReport& r) {
  const std::string csv = stem + "_slopes.csv";
  write_file(dir / csv, slopes_csv(r));
  write_file(dir / (stem + ".json"), dump_json(report_json(r, csv)));
}

inline WfReport load_report(const fs::path& json_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(json_path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  WfReport r;
  r.estimated = j.at("estimated").get<ConeSet>();
  r.params = params_from_json(j.at("params"), WfParams{});
  r.slopes = parse_slopes_csv(read_file(json_path.parent_path() / j.at("slopes_csv").get<std::string>()));
  return r;
}

inline void save_cone_set(const fs::path& p, const ConeSet& w) { write_file(p, dump_json(nlohmann::json(w))); }

inline ConeSet load_cone_set(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_file(p)).get<ConeSet>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("cone set: ") + e.what());
  }
}

}  // namespace grpd
