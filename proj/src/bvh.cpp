// SPDX-License-Identifier: Apache-2.0
#include "ccloth/bvh.hpp"

#include "ccloth/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ccloth {

void Aabb::expand(const Vec3& p) {
  mn = mn.cwiseMin(p);
  mx = mx.cwiseMax(p);
}

void Aabb::expand(const Aabb& b) {
  mn = mn.cwiseMin(b.mn);
  mx = mx.cwiseMax(b.mx);
}

void Aabb::inflate(double m) {
  mn.array() -= m;
  mx.array() += m;
}

bool Aabb::overlaps(const Aabb& b) const {
  return (mn.array() <= b.mx.array()).all() && (mx.array() >= b.mn.array()).all();
}

bool Aabb::contains(const Vec3& p) const {
  return (mn.array() <= p.array()).all() && (mx.array() >= p.array()).all();
}

double Aabb::distanceSq(const Vec3& p) const {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double lo = mn[k] - p[k];
    const double hi = p[k] - mx[k];
    if (lo > 0.0) d += lo * lo;
    if (hi > 0.0) d += hi * hi;
  }
  return d;
}

Aabb faceBox(const TriMesh& mesh, int faceIdx, std::span<const Vec3> positions, double margin) {
  Aabb box;
  for (int v : mesh.faces[faceIdx]) box.expand(positions[v]);
  if (margin > 0.0) box.inflate(margin);
  return box;
}

int BvhTree::buildRange(std::vector<int>& order, std::vector<Vec3>& centroids,
                        const TriMesh& mesh, std::span<const Vec3> positions, int begin, int end,
                        int leafSize) {
  (void)mesh;
  (void)positions;
  Node node;
  for (int i = begin; i < end; ++i) node.box.expand(faceBoxes_[order[i]]);

  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (end - begin <= leafSize) {
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    return idx;
  }

  Aabb centroidBox;
  for (int i = begin; i < end; ++i) centroidBox.expand(centroids[order[i]]);
  const Vec3 extent = centroidBox.mx - centroidBox.mn;
  int axis = 0;
  if (extent[1] > extent[axis]) axis = 1;
  if (extent[2] > extent[axis]) axis = 2;

  const int mid = (begin + end) / 2;
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](int a, int b) {
                     const double ca = centroids[a][axis], cb = centroids[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  const int left = buildRange(order, centroids, mesh, positions, begin, mid, leafSize);
  const int right = buildRange(order, centroids, mesh, positions, mid, end, leafSize);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  nodes_[idx].box = nodes_[left].box;
  nodes_[idx].box.expand(nodes_[right].box);
  return idx;
}

BvhTree BvhTree::build(const TriMesh& mesh, std::span<const Vec3> positions, double margin,
                       int leafSize) {
  if (mesh.faceCount() == 0) fail(ErrorCode::EmptyMesh, "cannot build a BVH over zero faces");
  BvhTree tree;
  tree.margin_ = margin;

  std::vector<Vec3> centroids(mesh.faceCount());
  for (int f = 0; f < mesh.faceCount(); ++f) {
    const Face& face = mesh.faces[f];
    centroids[f] = (positions[face[0]] + positions[face[1]] + positions[face[2]]) / 3.0;
  }
  tree.faceOrder_.resize(mesh.faceCount());
  for (int f = 0; f < mesh.faceCount(); ++f) tree.faceOrder_[f] = f;
  tree.faceBoxes_.resize(mesh.faceCount());
  for (int f = 0; f < mesh.faceCount(); ++f)
    tree.faceBoxes_[f] = faceBox(mesh, f, positions, margin);

  tree.nodes_.reserve(2 * mesh.faceCount());
  tree.root_ = tree.buildRange(tree.faceOrder_, centroids, mesh, positions, 0, mesh.faceCount(),
                               std::max(1, leafSize));
  return tree;
}

void BvhTree::refit(const TriMesh& mesh, std::span<const Vec3> positions) {
  for (int f = 0; f < mesh.faceCount(); ++f) faceBoxes_[f] = faceBox(mesh, f, positions, margin_);
  // Children were appended after their parent, so a reverse sweep sees
  // children before parents.
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Node& node = nodes_[i];
    if (node.left < 0) {
      node.box = Aabb{};
      for (int k = node.begin; k < node.end; ++k) node.box.expand(faceBoxes_[faceOrder_[k]]);
    } else {
      node.box = nodes_[node.left].box;
      node.box.expand(nodes_[node.right].box);
    }
  }
}

void BvhTree::query(const Aabb& box, std::vector<int>& outFaces) const {
  if (root_ < 0) return;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.box.overlaps(box)) continue;
    if (node.left < 0) {
      for (int k = node.begin; k < node.end; ++k) {
        const int f = faceOrder_[k];
        if (faceBoxes_[f].overlaps(box)) outFaces.push_back(f);
      }
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::sort(outFaces.begin(), outFaces.end());
}

std::vector<std::pair<int, int>> BvhTree::selfOverlaps() const {
  std::vector<std::pair<int, int>> pairs;
  if (root_ < 0) return pairs;
  std::vector<std::pair<int, int>> stack{{root_, root_}};
  while (!stack.empty()) {
    const auto [ia, ib] = stack.back();
    stack.pop_back();
    const Node& a = nodes_[ia];
    const Node& b = nodes_[ib];
    if (ia != ib && !a.box.overlaps(b.box)) continue;

    const bool leafA = a.left < 0, leafB = b.left < 0;
    if (leafA && leafB) {
      for (int i = a.begin; i < a.end; ++i) {
        const int startJ = (ia == ib) ? i + 1 : b.begin;
        for (int j = startJ; j < b.end; ++j) {
          int fa = faceOrder_[i], fb = faceOrder_[j];
          if (fa > fb) std::swap(fa, fb);
          if (faceBoxes_[fa].overlaps(faceBoxes_[fb])) pairs.emplace_back(fa, fb);
        }
      }
    } else if (ia == ib) {
      stack.emplace_back(a.left, a.left);
      stack.emplace_back(a.right, a.right);
      stack.emplace_back(a.left, a.right);
    } else if (!leafA) {
      stack.emplace_back(a.left, ib);
      stack.emplace_back(a.right, ib);
    } else {
      stack.emplace_back(ia, b.left);
      stack.emplace_back(ia, b.right);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

ClosestPointHit BvhTree::closestPoint(const Vec3& p, const TriMesh& mesh,
                                      std::span<const Vec3> positions) const {
  ClosestPointHit best;
  if (root_ < 0) return best;
  double bestSq = std::numeric_limits<double>::max();

  // Depth-first with lower-bound pruning; nearer child visited first.
  struct Entry {
    int node;
    double boundSq;
  };
  std::vector<Entry> stack{{root_, nodes_[root_].box.distanceSq(p)}};
  while (!stack.empty()) {
    const Entry e = stack.back();
    stack.pop_back();
    if (e.boundSq >= bestSq) continue;
    const Node& node = nodes_[e.node];
    if (node.left < 0) {
      for (int k = node.begin; k < node.end; ++k) {
        const int f = faceOrder_[k];
        const Face& face = mesh.faces[f];
        const Vec3 q =
            closestPointOnTriangle(p, positions[face[0]], positions[face[1]], positions[face[2]]);
        const double dSq = (q - p).squaredNorm();
        // Tie-break on face id so results do not depend on traversal order.
        if (dSq < bestSq || (dSq == bestSq && f < best.face)) {
          bestSq = dSq;
          best.face = f;
          best.point = q;
        }
      }
    } else {
      const double dl = nodes_[node.left].box.distanceSq(p);
      const double dr = nodes_[node.right].box.distanceSq(p);
      if (dl < dr) {
        if (dr < bestSq) stack.push_back({node.right, dr});
        if (dl < bestSq) stack.push_back({node.left, dl});
      } else {
        if (dl < bestSq) stack.push_back({node.left, dl});
        if (dr < bestSq) stack.push_back({node.right, dr});
      }
    }
  }
  best.distance = std::sqrt(bestSq);
  return best;
}

}  // namespace ccloth
