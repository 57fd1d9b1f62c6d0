// Binary field snapshots with a key = value sidecar. The byte layout is
// described in docs/snapshot-format.md.
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "crflow/field.hpp"

namespace crflow {

inline constexpr char kSnapshotMagic[8] = {'C', 'R', 'F', 'L', 'O', 'W', 'S', 'N'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 64;

using SnapshotMeta = std::map<std::string, std::string>;

/// Writes `path` and `path + ".meta"`. Throws ConfigError on I/O failure.
void write_snapshot(const std::string& path, const ScalarField& f, const SnapshotMeta& meta = {});
void write_snapshot(const std::string& path, const SymTensorField& f, const SnapshotMeta& meta = {});

struct SnapshotHeader {
    std::array<int, 3> n{};
    std::array<double, 3> period{};
    std::uint32_t components = 0;
    std::uint32_t order = 2;
    Grid grid() const;
};

SnapshotHeader read_snapshot_header(const std::string& path);
/// Throw ConfigError on a bad magic, version, truncated payload or component
/// count that does not match the requested field type.
ScalarField read_scalar_snapshot(const std::string& path);
SymTensorField read_tensor_snapshot(const std::string& path);
/// Sidecar entries; empty if the sidecar is missing.
SnapshotMeta read_snapshot_meta(const std::string& path);

}  // namespace crflow
