// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/collision.hpp"

#include <iosfwd>

namespace ccloth {

// Chained sequence of triangle-pair intersections. Consecutive segments share
// a physical crossing (same edge through the same host face); closed contours
// loop back to the start.
struct IntersectionContour {
  std::vector<int> segments;      // indices into the intersection list, chain order
  bool closed = false;
  std::vector<int> insideNodes;   // sorted; nonempty only for closed contours
  std::vector<int> touchedNodes;  // sorted; vertices of every face in any segment
};

enum class NodeClass : std::uint8_t { Repelled, NonRepelled };

struct NodeClassification {
  std::vector<NodeClass> perNode;

  bool repelled(int v) const { return perNode[v] == NodeClass::Repelled; }
};

// Partitions the intersections into contours by crossing adjacency. Every
// intersection lands in exactly one contour; unchainable singletons become
// length-1 open contours and branched chains (non-manifold pathology) are kept
// as one open contour.
std::vector<IntersectionContour> makeContours(const std::vector<TriPairIntersection>& intersections,
                                              const TriMesh& mesh);

struct SplitResult {
  bool ok = false;  // false: cutting the contour edges disconnected nothing
  std::vector<int> insideNodes;
  std::vector<int> outsideNodes;
};

// Flood fill over face adjacency of the pierced surface, barred from crossing
// edges cut by the contour. Per pierced mesh component the smaller part (node
// count, ties to the part holding the lowest vertex id) counts as inside.
SplitResult splitByClosedContour(const IntersectionContour& contour,
                                 const std::vector<TriPairIntersection>& intersections,
                                 const TriMesh& mesh);

// splitByClosedContour on every closed contour; failures demote the contour
// to open (conservative).
void resolveContourInteriors(std::vector<IntersectionContour>& contours,
                             const std::vector<TriPairIntersection>& intersections,
                             const TriMesh& mesh);

// Drops closed contours whose touched nodes all lie inside another closed
// contour. Open contours are always kept.
std::vector<IntersectionContour> removeNested(std::vector<IntersectionContour> contours);

// NonRepelled = open-contour touched nodes plus closed-contour inside nodes.
NodeClassification classifyNodes(const std::vector<IntersectionContour>& contours,
                                 const TriMesh& mesh);

// A correspondence is repulsive iff its node and all three face vertices are
// repelled.
void classifyCorrespondences(std::vector<Correspondence>& correspondences,
                             const NodeClassification& classification, const TriMesh& mesh);

// Debug export: one OBJ polyline per contour.
void writeContourObj(std::ostream& out, const std::vector<IntersectionContour>& contours,
                     const std::vector<TriPairIntersection>& intersections);

}  // namespace ccloth
