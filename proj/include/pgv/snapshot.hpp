#ifndef PGV_SNAPSHOT_HPP
#define PGV_SNAPSHOT_HPP

// PGVS binary snapshots. Layout (all little-endian):
//   "PGVS" | u32 version=1 | u32 nx, ny, nz_t, nz_v | f64 lx, ly, robin_alpha
//   then blocks: 4-byte code ("TEMP", "VEL1", "VEL2") followed by the
//   block's complex coefficients as (re, im) f64 pairs in slot order.
// A TEMP block holds nkx*nky*nz_t values, a VEL block nkx*nky*nz_v.

#include <iosfwd>
#include <optional>
#include <string>

#include "pgv/field_algebra.hpp"
#include "pgv/model.hpp"

namespace pgv {

struct Snapshot {
  std::uint32_t nx = 0, ny = 0, nz_t = 0, nz_v = 0;
  double lx = 0.0, ly = 0.0, robin_alpha = 0.0;
  std::optional<TemperatureField> temperature;
  std::optional<VelocityField> velocity;
};

void write_snapshot(std::ostream& os, const Model& model, const TemperatureField* temperature,
                    const VelocityField* velocity);
void write_snapshot(const std::string& path, const Model& model,
                    const TemperatureField* temperature, const VelocityField* velocity);

/// Throws std::runtime_error on a malformed stream.
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

}  // namespace pgv

#endif  // PGV_SNAPSHOT_HPP
