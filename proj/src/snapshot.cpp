#include "levyheat/snapshot.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace levyheat {

namespace {

constexpr char kMagic[4] = {'L', 'V', 'H', 'K'};

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw numerical_error("cannot open snapshot for writing: " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, snap.version);
  put<std::uint32_t>(os, snap.oracle ? 1u : 0u);
  put<std::uint32_t>(os, std::uint32_t(snap.dim));
  put<std::uint32_t>(os, std::uint32_t(snap.n));
  put<double>(os, snap.dx);
  put<double>(os, snap.x_max);
  put<double>(os, snap.t);
  put<std::uint64_t>(os, snap.data.size());
  os.write(reinterpret_cast<const char*>(snap.data.data()),
           std::streamsize(snap.data.size() * sizeof(double)));
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw numerical_error("cannot open snapshot: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw numerical_error("not a kernel snapshot: " + path);
  Snapshot snap;
  snap.version = take<std::uint32_t>(is);
  snap.oracle = take<std::uint32_t>(is) & 1u;
  snap.dim = int(take<std::uint32_t>(is));
  snap.n = int(take<std::uint32_t>(is));
  snap.dx = take<double>(is);
  snap.x_max = take<double>(is);
  snap.t = take<double>(is);
  std::uint64_t count = take<std::uint64_t>(is);
  snap.data.resize(count);
  is.read(reinterpret_cast<char*>(snap.data.data()),
          std::streamsize(count * sizeof(double)));
  if (!is) throw numerical_error("truncated snapshot: " + path);
  return snap;
}

nlohmann::json SnapshotDiff::to_json() const {
  nlohmann::json j;
  j["max_rel"] = max_rel;
  j["median_rel"] = median_rel;
  j["header_match"] = header_match;
  return j;
}

SnapshotDiff diff_snapshots(const std::string& pa, const std::string& pb,
                            double denom_floor) {
  Snapshot a = read_snapshot(pa);
  Snapshot b = read_snapshot(pb);
  SnapshotDiff d;
  d.header_match = a.dim == b.dim && a.n == b.n &&
                   std::abs(a.t - b.t) <= 1e-12 * std::max(1.0, a.t);
  if (!d.header_match)
    throw config_error("snapshot headers do not match (dim/n/t)");
  if (a.data.size() != b.data.size())
    throw config_error("snapshot payload sizes differ");
  double peak = 0.0;
  for (double v : a.data) peak = std::max(peak, std::abs(v));
  double floor = std::max(denom_floor, 1e-12 * peak);
  std::vector<double> rels;
  rels.reserve(a.data.size());
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    double den = std::max({std::abs(a.data[i]), std::abs(b.data[i]), floor});
    rels.push_back(std::abs(a.data[i] - b.data[i]) / den);
  }
  for (double r : rels) d.max_rel = std::max(d.max_rel, r);
  d.median_rel = median(rels);
  return d;
}

}  // namespace levyheat
