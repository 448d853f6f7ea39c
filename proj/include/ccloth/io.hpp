// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/solver.hpp"

#include <string>

namespace ccloth {

struct ObjData {
  Positions positions;
  std::vector<Face> faces;
};

// OBJ subset: v and f records, quads fan-triangulated as (v0,v1,v2),(v0,v2,v3).
// vn/vt are ignored with a warning; other records are skipped silently.
ObjData readObj(const std::string& path);
void writeObj(const std::string& path, std::span<const Vec3> positions,
              std::span<const Face> faces);

// Body-motion container (.mseq): constant topology, bit-exact little-endian
// f64 positions per frame. Magic "MSEQ1".
struct MotionSequence {
  int vertexCount = 0;
  std::vector<Face> faces;
  double fps = 30.0;
  std::vector<Positions> frames;

  bool empty() const { return frames.empty(); }
};

MotionSequence readMotionSequence(const std::string& path);
void writeMotionSequence(const std::string& path, const MotionSequence& seq);

// Fixed column order: frame, intersectingPairs, icLoss, per-term energies,
// innerIters, wallTimeMs. Doubles are printed round-trippably.
extern const std::vector<std::string> kStatsEnergyColumns;

void writeStatsCsv(const std::vector<FrameStats>& records, const std::string& path);
std::vector<FrameStats> readStatsCsv(const std::string& path);

// config.json mirrors SolverConfig + MaterialParams one-to-one; unknown keys
// are errors.
SolverConfig loadConfig(const std::string& path);
void saveConfig(const std::string& path, const SolverConfig& config);

std::string icModeName(IcGradientMode mode);
IcGradientMode icModeFromName(const std::string& name);
std::string ablationName(Ablation ablation);
Ablation ablationFromName(const std::string& name);

}  // namespace ccloth
