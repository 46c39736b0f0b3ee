#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nscheps/analysis.hpp"
#include "nscheps/coupled.hpp"

namespace nscheps {

/// Contents of an EPSF snapshot file.
///
/// Layout, little-endian: "EPSF", u32 version (1), u32 nx, u32 ny, f64 t,
/// then phi, mu, p (nx*ny each, row-major), u ((nx+1)*ny), v (nx*(ny+1)).
struct SnapshotData {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double t = 0.0;
  std::vector<double> phi;
  std::vector<double> mu;
  std::vector<double> p;
  std::vector<double> u;
  std::vector<double> v;
};

constexpr std::uint32_t snapshot_version = 1;

std::size_t snapshot_size(std::uint32_t nx, std::uint32_t ny);
std::vector<unsigned char> encode_snapshot(const SimState& state);
/// Throws Error(format) naming the byte offset of the first problem.
SnapshotData decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const SimState& state, const std::string& path);
SnapshotData read_snapshot(const std::string& path);

/// Number formatting used by every CSV: 17 significant digits.
std::string format_number(double x);

std::string timeseries_csv(const std::vector<EnergyRecord>& records);
std::string sweep_csv(const SweepReport& report);
std::string gamma_csv(const GammaTable& table);
std::string operator_csv(const OperatorTable& table);
std::string lemma34_csv(const SweepReport& report);

void write_text(const std::string& path, const std::string& text);
inline void write_timeseries(const std::vector<EnergyRecord>& records, const std::string& path) {
  write_text(path, timeseries_csv(records));
}
inline void write_sweep_report(const SweepReport& report, const std::string& path) {
  write_text(path, sweep_csv(report));
}

}  // namespace nscheps
