// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/mesh.hpp"

#include <limits>
#include <span>

namespace ccloth {

struct Aabb {
  Vec3 mn{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
          std::numeric_limits<double>::max()};
  Vec3 mx{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
          std::numeric_limits<double>::lowest()};

  void expand(const Vec3& p);
  void expand(const Aabb& b);
  void inflate(double m);
  bool overlaps(const Aabb& b) const;
  bool contains(const Vec3& p) const;
  double distanceSq(const Vec3& p) const;  // 0 inside
};

Aabb faceBox(const TriMesh& mesh, int faceIdx, std::span<const Vec3> positions, double margin);

struct ClosestPointHit {
  int face = -1;
  Vec3 point = Vec3::Zero();
  double distance = std::numeric_limits<double>::max();
};

// Median-split BVH over face boxes inflated by a fixed margin. Structure is
// deterministic for fixed input; refit updates boxes without rebuilding, for
// use between inner solver iterations.
class BvhTree {
 public:
  BvhTree() = default;

  // Throws EmptyMesh; positions must be finite.
  static BvhTree build(const TriMesh& mesh, std::span<const Vec3> positions, double margin,
                       int leafSize = 4);

  void refit(const TriMesh& mesh, std::span<const Vec3> positions);

  // Faces whose inflated box overlaps `box`, ascending face id. Candidates are
  // filtered against the exact per-face boxes, so results do not depend on the
  // tree structure.
  void query(const Aabb& box, std::vector<int>& outFaces) const;

  // All face pairs (a < b) with overlapping inflated boxes, sorted.
  std::vector<std::pair<int, int>> selfOverlaps() const;

  // Closest point on the mesh surface to p (margin ignored).
  ClosestPointHit closestPoint(const Vec3& p, const TriMesh& mesh,
                               std::span<const Vec3> positions) const;

  double margin() const { return margin_; }
  bool empty() const { return nodes_.empty(); }

 private:
  struct Node {
    Aabb box;
    int left = -1, right = -1;  // children; leaf when left < 0
    int begin = 0, end = 0;     // leaf range into faceOrder_
  };

  int buildRange(std::vector<int>& order, std::vector<Vec3>& centroids,
                 const TriMesh& mesh, std::span<const Vec3> positions, int begin, int end,
                 int leafSize);

  std::vector<Node> nodes_;
  std::vector<int> faceOrder_;
  std::vector<Aabb> faceBoxes_;  // inflated, indexed by face id
  int root_ = -1;
  double margin_ = 0.0;
};

}  // namespace ccloth
