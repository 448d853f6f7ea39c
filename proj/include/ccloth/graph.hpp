// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/contours.hpp"

#include <iosfwd>

namespace ccloth {

struct WorldGraphConfig {
  double epsCloth = 0.01;
  double epsBody = 0.03;
  // false reproduces the only-repulsive ablation: contours are skipped and
  // every correspondence stays repulsive.
  bool classifyInteractions = true;
};

// Full per-frame interaction graph: garment edges, body edges, repulsive and
// non-repulsive world edges, plus the contour structure they came from.
struct WorldGraph {
  std::vector<Edge> garmentEdges;
  std::vector<std::pair<int, int>> bodyEdges;
  std::vector<Correspondence> repulsiveWorld;
  std::vector<Correspondence> nonRepulsiveWorld;
  std::vector<TriPairIntersection> intersections;
  std::vector<IntersectionContour> contours;
  NodeClassification nodeClass;

  int openContours() const;
  int closedContours() const;
};

// Pipeline: buildGraph -> addBodyEdges -> DCD -> makeContours -> interiors ->
// removeNested -> findClothCorrespondences -> classify -> world edges.
// bodyMesh may be null.
WorldGraph buildInputGraph(const TriMesh& garment, std::span<const Vec3> positions,
                           std::span<const Vec3> prevPositions, const TriMesh* bodyMesh,
                           std::span<const Vec3> bodyPositions, const WorldGraphConfig& config);

// Deterministic structured-text dump: node classes, world edges with
// repulsive flags, contour polylines.
void dumpWorldGraph(std::ostream& out, const WorldGraph& graph);

}  // namespace ccloth
