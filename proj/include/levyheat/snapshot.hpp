#pragma once

// Compact binary snapshots of kernel slices for regression diffs: a fixed
// little-endian header followed by the row-major slice as 8-byte floats.

#include <json.hpp>
#include <string>
#include <vector>

#include "levyheat/numerics.hpp"

namespace levyheat {

struct Snapshot {
  std::uint32_t version = 1;
  bool oracle = false;
  int dim = 1;
  int n = 0;
  double dx = 0.0;
  double x_max = 0.0;
  double t = 0.0;
  std::vector<double> data;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

struct SnapshotDiff {
  double max_rel = 0.0;
  double median_rel = 0.0;
  bool header_match = false;
  nlohmann::json to_json() const;
};

SnapshotDiff diff_snapshots(const std::string& a, const std::string& b,
                            double denom_floor = 0.0);

}  // namespace levyheat
