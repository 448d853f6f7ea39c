// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/bvh.hpp"

#include <optional>

namespace ccloth {

// One edge crossing through a face. s is the relative coordinate of the
// crossing on the edge: s = ((xD . n) - (x0 . n)) / ((x1 - x0) . n); the host
// plane (n, offset) is captured at detection so losses can be re-evaluated
// smoothly while the intersection record is held fixed.
struct EdgeFaceCrossing {
  Edge edge{-1, -1};
  int hostFace = -1;
  double s = 0.0;
  Vec3 point = Vec3::Zero();
  Vec3 hostNormal = Vec3::Zero();  // unit
  double hostOffset = 0.0;         // hostNormal . (any point on the host plane)
};

// An intersecting triangle pair with its two edge-face crossings.
struct TriPairIntersection {
  int faceA = -1, faceB = -1;  // faceA < faceB
  std::array<EdgeFaceCrossing, 2> crossings;
};

// Face-node proximity pair. dCurr/dPrev are signed distances along the face
// normal; bary/normal hold the projection-foot geometry frozen per gradient
// evaluation for the repulsion term.
struct Correspondence {
  int node = -1, face = -1;
  double dCurr = 0.0, dPrev = 0.0;
  Vec3 bary = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  bool repulsive = true;
};

// Intersection test for two triangles that share no vertex. Returns the pair's
// two crossings, or empty when the triangles are disjoint, coplanar, only
// touching within tolerance, or grazing with a single valid crossing.
std::optional<TriPairIntersection> triTriIntersect(const std::array<Vec3, 3>& triA,
                                                   const std::array<Vec3, 3>& triB,
                                                   const std::array<int, 3>& idxA,
                                                   const std::array<int, 3>& idxB, int faceA,
                                                   int faceB);

std::optional<TriPairIntersection> triTriIntersect(const TriMesh& mesh,
                                                   std::span<const Vec3> positions, int faceA,
                                                   int faceB);

// All intersecting non-adjacent face pairs, each reported once with
// faceA < faceB, sorted. Pairs sharing any vertex are excluded.
std::vector<TriPairIntersection> detectIntersections(const TriMesh& mesh,
                                                     std::span<const Vec3> positions,
                                                     const BvhTree& bvh);

// Face-node pairs with |distance| <= eps whose normal projection lands
// strictly inside the face; dPrev falls back to sign(dCurr) * eps when the
// pair does not qualify at the previous positions.
std::vector<Correspondence> findClothCorrespondences(const TriMesh& mesh,
                                                     std::span<const Vec3> positions,
                                                     std::span<const Vec3> prevPositions,
                                                     const BvhTree& bvh, double eps);

// Re-derives the frozen projection geometry (normal, foot barycentrics) and
// dCurr for an existing correspondence set from the given positions.
void refreshCorrespondenceGeometry(std::vector<Correspondence>& correspondences,
                                   const TriMesh& mesh, std::span<const Vec3> positions);

// Nearest body node per garment node when closer than epsBody; at most one
// edge per garment node, ties broken toward the lower body node id.
std::vector<std::pair<int, int>> findBodyEdges(std::span<const Vec3> garmentPositions,
                                               const TriMesh& bodyMesh,
                                               std::span<const Vec3> bodyPositions,
                                               const BvhTree& bodyBvh, double epsBody);

int countIntersectingPairs(const TriMesh& mesh, std::span<const Vec3> positions);

}  // namespace ccloth
