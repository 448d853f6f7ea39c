// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/io.hpp"

namespace ccloth {

// Desk-scale synthetic scenes. Each contour class (open, closed, nested,
// popped) is exercised by at least one recipe.
enum class SceneKind { StackedSheets, SphereBody, PiercedSheet, NestedPierce, PoppedPocket };

struct SceneRecipe {
  SceneKind kind = SceneKind::StackedSheets;
  int resolution = 0;      // 0 -> per-kind default
  double scale = 0.0;      // m, 0 -> per-kind default
  double offset = 0.0;     // kind-specific (layer gap, bump height), 0 -> default
  std::uint64_t seed = 0;  // jitter seed; generation is deterministic per seed
  int bodyFrames = 0;      // generated body frames (0 -> per-kind default)
};

struct Scene {
  Positions positions;
  std::vector<Face> faces;
  std::vector<GarmentPiece> pieces;
  std::vector<int> pinned;
  MotionSequence body;  // empty frames -> no body
  SolverConfig config;  // tuned reference config for this scene
};

SceneKind sceneKindFromName(const std::string& name);
std::string sceneKindName(SceneKind kind);

// Throws InvalidRecipe for out-of-range parameters.
Scene generateScene(const SceneRecipe& recipe);

}  // namespace ccloth
