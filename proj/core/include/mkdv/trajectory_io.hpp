#pragma once

#include "mkdv/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mkdv::io {

// Binary trajectory layout, little-endian, version 1:
//
//   offset  size  field
//        0     8  magic "MKDVTRJ1"
//        8     4  uint32 version (= 1)
//       12     4  uint32 reserved (= 0)
//       16     8  float64 L
//       24     8  uint64 M
//       32     8  uint64 K (number of snapshots)
//       40     8  float64 dt
//       48     4  int32 sign
//       52     4  int32 reserved (= 0)
//       56        K records: float64 t, then M pairs (float64 re, float64 im)
inline constexpr char kTrajectoryMagic[8] = {'M', 'K', 'D', 'V', 'T', 'R', 'J', '1'};
inline constexpr std::uint32_t kTrajectoryVersion = 1;

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

/// Extra CSV column holding the M^{2,p}_s norm of each snapshot.
struct NormColumn {
    std::string name;
    double s;
    double p;
};

/// CSV with '#' header comment lines, then the column header
/// "t,mass,momentum[,<name>...]". Numbers use 17 significant digits.
void write_invariants_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::vector<std::string>& header_comments,
                          const std::vector<NormColumn>& norms = {});

} // namespace mkdv::io
