// SPDX-License-Identifier: Apache-2.0
//
// Independent brute-force oracles used to freeze expected values. These stay
// deliberately separate from the library implementation paths they check.
#pragma once

#include "ccloth/graph.hpp"

#include <functional>
#include <random>
#include <set>

namespace ccloth::testing {

using Rng = std::mt19937_64;

// --- geometry oracle -------------------------------------------------------

struct OracleSegment {
  bool intersecting = false;
  bool uncertain = false;  // within tolerance of a degenerate configuration
  Vec3 p0 = Vec3::Zero(), p1 = Vec3::Zero();
};

// Exhaustive edge-plane clipping in both directions with signed-area inside
// tests; independent of triTriIntersect.
OracleSegment oracleTriTri(const std::array<Vec3, 3>& triA, const std::array<Vec3, 3>& triB);

// O(n^2) all-pairs scan over non-adjacent faces using the pair primitive.
std::vector<std::pair<int, int>> oracleIntersectingPairs(const TriMesh& mesh,
                                                         std::span<const Vec3> positions);

// O(n*m) node-face scan mirroring the Algorithm-1 predicate.
std::vector<std::pair<int, int>> oracleCorrespondences(const TriMesh& mesh,
                                                       std::span<const Vec3> positions,
                                                       double eps);

// O(n*m) nearest-body-node scan.
std::vector<std::pair<int, int>> oracleBodyEdges(std::span<const Vec3> garmentPositions,
                                                 std::span<const Vec3> bodyPositions,
                                                 double epsBody);

// --- contour oracles -------------------------------------------------------

// Union-find components of the intersection-adjacency graph plus a cycle
// check: a component is closed iff every shared crossing has degree two.
struct OracleContour {
  std::set<int> segments;
  bool closed = false;
};
std::vector<OracleContour> oracleContours(const std::vector<TriPairIntersection>& intersections);

// Union-find flood fill over faces, barred from crossing the cut edges.
// Returns per-face part ids (-1 for faces outside the touched components).
std::vector<int> oracleCutComponents(const TriMesh& mesh, const std::set<int>& cutEdges,
                                     const std::set<int>& touchedMeshComponents);

// --- finite differences ----------------------------------------------------

Positions finiteDifferenceGradient(const std::function<double(const Positions&)>& f,
                                   const Positions& x, double h);

double maxRelativeError(const Positions& analytic, const Positions& numeric);

// --- small builders --------------------------------------------------------

struct SimpleMesh {
  Positions positions;
  std::vector<Face> faces;
};

SimpleMesh makeSheet(int n, double size, double z, const Vec3& origin = Vec3::Zero());
SimpleMesh makeSphere(int segments, int rings, double radius, const Vec3& center);

// Random smooth crumpling applied to a sheet, deterministic per rng state.
void crumple(Positions& positions, Rng& rng, double amplitude);

TriMesh toMesh(const SimpleMesh& m, double density = 0.15);

}  // namespace ccloth::testing
