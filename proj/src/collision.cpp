// SPDX-License-Identifier: Apache-2.0
#include "ccloth/collision.hpp"

#include "ccloth/geometry.hpp"
#include "ccloth/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace ccloth {

namespace {

// Boundary-grazing crossings (the point on the host triangle's border at
// machine-epsilon scale) count as touching, not interpenetration.
constexpr double kStrictInside = 1e-12;  // barycentric

// Crossings of tri edges against the host triangle's plane, kept when the
// crossing point lands strictly inside the host.
void gatherCrossings(const std::array<Vec3, 3>& tri, const std::array<int, 3>& idx,
                     const std::array<Vec3, 3>& host, int hostFace, const Vec3& n, double offset,
                     std::vector<EdgeFaceCrossing>& out) {
  for (int k = 0; k < 3; ++k) {
    const Vec3& x0 = tri[k];
    const Vec3& x1 = tri[(k + 1) % 3];
    const Vec3 d = x1 - x0;
    const double denom = d.dot(n);
    if (std::abs(denom) < kParallelTolerance * d.norm()) continue;
    const double s = (offset - x0.dot(n)) / denom;
    if (s < 0.0 || s > 1.0) continue;
    const Vec3 p = x0 + s * d;
    const Vec3 bc = barycentric(p, host[0], host[1], host[2]);
    if (!(bc[0] > kStrictInside && bc[1] > kStrictInside && bc[2] > kStrictInside)) continue;
    EdgeFaceCrossing crossing;
    crossing.edge = Edge{idx[k], idx[(k + 1) % 3]};
    crossing.hostFace = hostFace;
    crossing.s = s;
    crossing.point = p;
    crossing.hostNormal = n;
    crossing.hostOffset = offset;
    out.push_back(crossing);
  }
}

}  // namespace

std::optional<TriPairIntersection> triTriIntersect(const std::array<Vec3, 3>& triA,
                                                   const std::array<Vec3, 3>& triB,
                                                   const std::array<int, 3>& idxA,
                                                   const std::array<int, 3>& idxB, int faceA,
                                                   int faceB) {
  const Vec3 crossA = (triA[1] - triA[0]).cross(triA[2] - triA[0]);
  const Vec3 crossB = (triB[1] - triB[0]).cross(triB[2] - triB[0]);
  const double lenA = crossA.norm(), lenB = crossB.norm();
  if (0.5 * lenA <= kAreaTolerance || 0.5 * lenB <= kAreaTolerance) return std::nullopt;
  const Vec3 nA = crossA / lenA, nB = crossB / lenB;

  std::vector<EdgeFaceCrossing> crossings;
  crossings.reserve(4);
  gatherCrossings(triA, idxA, triB, faceB, nB, nB.dot(triB[0]), crossings);
  gatherCrossings(triB, idxB, triA, faceA, nA, nA.dot(triA[0]), crossings);

  // Generic transversal intersection yields exactly two crossings; degenerate
  // configurations (vertex on plane, grazing contact) collapse duplicates or
  // leave a single crossing and are discarded.
  std::vector<EdgeFaceCrossing> unique;
  for (const EdgeFaceCrossing& c : crossings) {
    bool dup = false;
    for (const EdgeFaceCrossing& u : unique)
      if ((u.point - c.point).norm() < kCrossingTolerance) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(c);
  }
  if (unique.size() != 2) return std::nullopt;

  TriPairIntersection pair;
  pair.faceA = faceA;
  pair.faceB = faceB;
  pair.crossings = {unique[0], unique[1]};
  return pair;
}

std::optional<TriPairIntersection> triTriIntersect(const TriMesh& mesh,
                                                   std::span<const Vec3> positions, int faceA,
                                                   int faceB) {
  const Face& fa = mesh.faces[faceA];
  const Face& fb = mesh.faces[faceB];
  return triTriIntersect({positions[fa[0]], positions[fa[1]], positions[fa[2]]},
                         {positions[fb[0]], positions[fb[1]], positions[fb[2]]},
                         {fa[0], fa[1], fa[2]}, {fb[0], fb[1], fb[2]}, faceA, faceB);
}

std::vector<TriPairIntersection> detectIntersections(const TriMesh& mesh,
                                                     std::span<const Vec3> positions,
                                                     const BvhTree& bvh) {
  const std::vector<std::pair<int, int>> candidates = bvh.selfOverlaps();

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(candidates.size());
  for (const auto& [a, b] : candidates)
    if (!mesh.facesShareVertex(a, b)) pairs.push_back({a, b});

  const std::size_t chunkSize = 256;
  std::vector<std::vector<TriPairIntersection>> perChunk(chunkCount(pairs.size(), chunkSize));
  parallelChunks(pairs.size(), chunkSize, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto hit = triTriIntersect(mesh, positions, pairs[i].first, pairs[i].second);
      if (hit) perChunk[c].push_back(*hit);
    }
  });

  std::vector<TriPairIntersection> result;
  for (const auto& chunk : perChunk) result.insert(result.end(), chunk.begin(), chunk.end());
  return result;
}

std::vector<Correspondence> findClothCorrespondences(const TriMesh& mesh,
                                                     std::span<const Vec3> positions,
                                                     std::span<const Vec3> prevPositions,
                                                     const BvhTree& bvh, double eps) {
  const int nv = mesh.vertexCount();
  const std::size_t chunkSize = 64;
  std::vector<std::vector<Correspondence>> perChunk(chunkCount(nv, chunkSize));

  parallelChunks(nv, chunkSize, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    std::vector<int> candidateFaces;
    for (std::size_t v = lo; v < hi; ++v) {
      const Vec3& x = positions[v];
      Aabb box;
      box.expand(x);
      box.inflate(eps);
      candidateFaces.clear();
      bvh.query(box, candidateFaces);

      for (int f : candidateFaces) {
        const Face& face = mesh.faces[f];
        if (face[0] == static_cast<int>(v) || face[1] == static_cast<int>(v) ||
            face[2] == static_cast<int>(v))
          continue;

        const Vec3& a = positions[face[0]];
        const Vec3& b = positions[face[1]];
        const Vec3& c2 = positions[face[2]];
        Vec3 n;
        try {
          n = faceNormal(a, b, c2);
        } catch (const Error&) {
          continue;
        }
        const double d = (x - a).dot(n);
        if (std::abs(d) > eps) continue;
        const Vec3 foot = x - d * n;
        const Vec3 bc = barycentric(foot, a, b, c2);
        if (!(bc[0] > 0.0 && bc[1] > 0.0 && bc[2] > 0.0)) continue;

        Correspondence corr;
        corr.node = static_cast<int>(v);
        corr.face = f;
        corr.dCurr = d;
        corr.bary = bc;
        corr.normal = n;

        // dPrev from the previous positions when the pair also qualified
        // there; otherwise treat the node as having approached from its
        // current side.
        bool prevValid = false;
        double dPrev = 0.0;
        try {
          const Vec3& pa = prevPositions[face[0]];
          const Vec3 np = faceNormal(pa, prevPositions[face[1]], prevPositions[face[2]]);
          const double dp = (prevPositions[v] - pa).dot(np);
          if (std::abs(dp) <= eps) {
            const Vec3 footPrev = prevPositions[v] - dp * np;
            const Vec3 bcp = barycentric(footPrev, pa, prevPositions[face[1]], prevPositions[face[2]]);
            if (bcp[0] > 0.0 && bcp[1] > 0.0 && bcp[2] > 0.0) {
              prevValid = true;
              dPrev = dp;
            }
          }
        } catch (const Error&) {
        }
        corr.dPrev = prevValid ? dPrev : (d < 0.0 ? -eps : eps);
        perChunk[c].push_back(corr);
      }
    }
  });

  std::vector<Correspondence> result;
  for (const auto& chunk : perChunk) result.insert(result.end(), chunk.begin(), chunk.end());
  return result;
}

void refreshCorrespondenceGeometry(std::vector<Correspondence>& correspondences,
                                   const TriMesh& mesh, std::span<const Vec3> positions) {
  for (Correspondence& corr : correspondences) {
    const Face& face = mesh.faces[corr.face];
    const Vec3& a = positions[face[0]];
    try {
      const Vec3 n = faceNormal(a, positions[face[1]], positions[face[2]]);
      const double d = (positions[corr.node] - a).dot(n);
      const Vec3 foot = positions[corr.node] - d * n;
      corr.normal = n;
      corr.dCurr = d;
      corr.bary = barycentric(foot, a, positions[face[1]], positions[face[2]]);
    } catch (const Error&) {
      // degenerate face this iteration: keep the previous frozen geometry
    }
  }
}

std::vector<std::pair<int, int>> findBodyEdges(std::span<const Vec3> garmentPositions,
                                               const TriMesh& bodyMesh,
                                               std::span<const Vec3> bodyPositions,
                                               const BvhTree& bodyBvh, double epsBody) {
  const std::size_t nv = garmentPositions.size();
  const std::size_t chunkSize = 64;
  std::vector<std::vector<std::pair<int, int>>> perChunk(chunkCount(nv, chunkSize));

  parallelChunks(nv, chunkSize, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    std::vector<int> candidateFaces;
    std::vector<int> candidateVerts;
    for (std::size_t v = lo; v < hi; ++v) {
      const Vec3& x = garmentPositions[v];
      Aabb box;
      box.expand(x);
      box.inflate(epsBody);
      candidateFaces.clear();
      bodyBvh.query(box, candidateFaces);

      candidateVerts.clear();
      for (int f : candidateFaces)
        for (int bv : bodyMesh.faces[f]) candidateVerts.push_back(bv);
      std::sort(candidateVerts.begin(), candidateVerts.end());
      candidateVerts.erase(std::unique(candidateVerts.begin(), candidateVerts.end()),
                           candidateVerts.end());

      int best = -1;
      double bestDist = epsBody;
      for (int bv : candidateVerts) {
        const double dist = (bodyPositions[bv] - x).norm();
        if (dist < bestDist) {
          bestDist = dist;
          best = bv;
        }
      }
      if (best >= 0) perChunk[c].push_back({static_cast<int>(v), best});
    }
  });

  std::vector<std::pair<int, int>> result;
  for (const auto& chunk : perChunk) result.insert(result.end(), chunk.begin(), chunk.end());
  return result;
}

int countIntersectingPairs(const TriMesh& mesh, std::span<const Vec3> positions) {
  if (mesh.faceCount() == 0) return 0;
  const BvhTree bvh = BvhTree::build(mesh, positions, 0.0);
  return static_cast<int>(detectIntersections(mesh, positions, bvh).size());
}

}  // namespace ccloth
