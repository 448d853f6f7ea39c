// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/energy.hpp"
#include "ccloth/graph.hpp"
#include "ccloth/ic_loss.hpp"

#include <functional>

namespace ccloth {

// Ablation modes mirroring the comparison structure: "ours" uses classified
// world edges plus the translational contour gradient, "full-gradient" both
// gradient components, "no-ic-loss" drops non-repulsive edges and the contour
// term, "only-repulsive" additionally skips classification entirely.
enum class Ablation { Ours, OnlyRepulsive, NoIcLoss, FullGradient };

struct BacktrackingConfig {
  double shrink = 0.5;
  double armijoConstant = 1e-4;
  int maxHalvings = 30;
};

struct SolverConfig {
  double dt = 1.0 / 30.0;  // s
  double lambda1 = 1.0;    // repulsion weight
  double lambda2 = 1.0;    // intersection-contour weight
  int maxInnerIters = 80;
  int graphRefreshEvery = 8;    // K
  double gradTolerance = 1e-6;  // N, max per-vertex force
  BacktrackingConfig backtracking;
  IcGradientMode icMode = IcGradientMode::TranslationalOnly;
  double xi = 0.001;       // m, repulsion threshold (fabric thickness)
  double epsCloth = 0.01;  // m, cloth correspondence threshold
  double epsBody = 0.03;   // m, body edge threshold
  Ablation ablation = Ablation::Ours;
  std::vector<int> pinnedVertices;
  int staticIterationCap = 600;   // resolveStatic budget
  bool staticGravity = false;     // include gravity in resolveStatic
  MaterialParams material;
};

struct FrameStats {
  int frame = 0;
  int intersectingPairs = 0;
  double icLoss = 0.0;  // m^2
  std::map<std::string, double> perTermEnergy;
  int innerIters = 0;
  double wallTimeMs = 0.0;
  bool lineSearchStalled = false;
};

struct SimState {
  Positions positions;
  Positions prevPositions;
  Positions velocities;
  int frameIndex = 0;
  FrameStats stats;
};

SimState makeSimState(Positions initialPositions);

// One optimization-based implicit-Euler step: minimizes the incremental
// potential plus lambda1 * repulsion + lambda2 * IC over the garment
// positions, rebuilding the world graph at iteration 0 and every K inner
// iterations. bodyMesh may be null. Throws NonFiniteState.
void stepFrame(SimState& state, const TriMesh& garment, const RestState& rest,
               const TriMesh* bodyMesh, std::span<const Vec3> bodyPositions,
               std::span<const Vec3> bodyPrevPositions, const SolverConfig& config);

enum class ResolveStatus { Resolved, Unresolved };

struct ResolveResult {
  ResolveStatus status = ResolveStatus::Unresolved;
  std::vector<int> trajectory;  // intersecting-pair count, initial then per iteration
  int iterations = 0;
};

// Static untangler: descends stretching + bending + lambda1 * repulsion +
// lambda2 * IC (gravity and body terms only when configured/present) until
// the intersection count reaches zero or the iteration cap. Unresolved is a
// status, not a failure.
ResolveResult resolveStatic(SimState& state, const TriMesh& garment, const RestState& rest,
                            const TriMesh* bodyMesh, std::span<const Vec3> bodyPositions,
                            const SolverConfig& config);

// stepFrame per body frame; per-frame stats are returned and streamed through
// onFrame. onPositions receives the end-of-frame positions.
std::vector<FrameStats> simulateSequence(
    const TriMesh& garment, const Positions& initialPositions, const TriMesh* bodyMesh,
    std::span<const Positions> bodyFrames, const SolverConfig& config,
    const std::function<void(const FrameStats&)>& onFrame = {},
    const std::function<void(int, const Positions&)>& onPositions = {});

}  // namespace ccloth
