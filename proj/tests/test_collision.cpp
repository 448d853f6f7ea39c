// SPDX-License-Identifier: Apache-2.0
#include "ccloth/collision.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ccloth;
using namespace ccloth::testing;

namespace {

std::array<Vec3, 3> randomTriangle(Rng& rng, double extent) {
  std::uniform_real_distribution<double> dist(-extent, extent);
  return {Vec3(dist(rng), dist(rng), dist(rng)), Vec3(dist(rng), dist(rng), dist(rng)),
          Vec3(dist(rng), dist(rng), dist(rng))};
}

SimpleMesh combine(const SimpleMesh& a, const SimpleMesh& b) {
  SimpleMesh out = a;
  const int base = static_cast<int>(a.positions.size());
  out.positions.insert(out.positions.end(), b.positions.begin(), b.positions.end());
  for (Face f : b.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  return out;
}

}  // namespace

TEST_CASE("symmetric plane crossing: s = 0.5 at both crossings") {
  const std::array<Vec3, 3> triA = {Vec3(0, -1, -1), Vec3(0, 1, -1), Vec3(0, 0, 1)};
  const std::array<Vec3, 3> triB = {Vec3(-1, -1, 0), Vec3(1, -1, 0), Vec3(0, 1.5, 0)};

  const auto hit = triTriIntersect(triA, triB, {0, 1, 2}, {3, 4, 5}, 0, 1);
  REQUIRE(hit.has_value());
  CHECK(hit->crossings[0].s == doctest::Approx(0.5));
  CHECK(hit->crossings[1].s == doctest::Approx(0.5));

  std::vector<Vec3> points = {hit->crossings[0].point, hit->crossings[1].point};
  std::sort(points.begin(), points.end(), [](const Vec3& a, const Vec3& b) { return a[1] < b[1]; });
  CHECK((points[0] - Vec3(0, -0.5, 0)).norm() < 1e-12);
  CHECK((points[1] - Vec3(0, 0.5, 0)).norm() < 1e-12);

  // both crossing points on the host plane and consistent with s
  for (const EdgeFaceCrossing& c : hit->crossings)
    CHECK(std::abs(c.point.dot(c.hostNormal) - c.hostOffset) < 1e-12);
}

TEST_CASE("parallel triangles a centimeter apart do not intersect") {
  const std::array<Vec3, 3> triA = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  const std::array<Vec3, 3> triB = {Vec3(0, 0, 0.01), Vec3(1, 0, 0.01), Vec3(0, 1, 0.01)};
  CHECK_FALSE(triTriIntersect(triA, triB, {0, 1, 2}, {3, 4, 5}, 0, 1).has_value());
}

TEST_CASE("random pairs match the clipping oracle") {
  Rng rng(101);
  int intersecting = 0, compared = 0, skipped = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto triA = randomTriangle(rng, 1.0);
    const auto triB = randomTriangle(rng, 1.0);
    const OracleSegment expected = oracleTriTri(triA, triB);
    if (expected.uncertain) {
      ++skipped;
      continue;
    }
    ++compared;
    const auto hit = triTriIntersect(triA, triB, {0, 1, 2}, {3, 4, 5}, 0, 1);
    REQUIRE_MESSAGE(hit.has_value() == expected.intersecting, "trial ", trial);
    if (!hit) continue;
    ++intersecting;
    const Vec3 a0 = hit->crossings[0].point, a1 = hit->crossings[1].point;
    const double direct = (a0 - expected.p0).norm() + (a1 - expected.p1).norm();
    const double swapped = (a0 - expected.p1).norm() + (a1 - expected.p0).norm();
    CHECK(std::min(direct, swapped) < 1e-7);

    // invariants: endpoints on the edge at parameter s, inside both planes
    for (const EdgeFaceCrossing& c : hit->crossings) {
      CHECK(std::abs(c.point.dot(c.hostNormal) - c.hostOffset) < 1e-9);
      CHECK(c.s >= 0.0);
      CHECK(c.s <= 1.0);
    }
  }
  CHECK(compared > 9000);    // degeneracy guard must not eat the sample
  CHECK(intersecting > 100);  // and some pairs actually intersect
}

TEST_CASE("s is invariant under rigid translation") {
  Rng rng(77);
  const Vec3 shift(3.21, -0.57, 12.9);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 50; ++trial) {
    const auto triA = randomTriangle(rng, 1.0);
    const auto triB = randomTriangle(rng, 1.0);
    const auto hit = triTriIntersect(triA, triB, {0, 1, 2}, {3, 4, 5}, 0, 1);
    if (!hit) continue;
    std::array<Vec3, 3> sA, sB;
    for (int k = 0; k < 3; ++k) {
      sA[k] = triA[k] + shift;
      sB[k] = triB[k] + shift;
    }
    const auto shifted = triTriIntersect(sA, sB, {0, 1, 2}, {3, 4, 5}, 0, 1);
    REQUIRE(shifted.has_value());
    for (int j = 0; j < 2; ++j)
      CHECK(hit->crossings[j].s == doctest::Approx(shifted->crossings[j].s).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("flat sheet has no self-intersections") {
  const SimpleMesh sheet = makeSheet(10, 0.3, 0.0);
  const TriMesh mesh = toMesh(sheet);
  const BvhTree bvh = BvhTree::build(mesh, sheet.positions, 0.0);
  CHECK(detectIntersections(mesh, sheet.positions, bvh).empty());
}

TEST_CASE("crossed quads match the brute-force scan") {
  SimpleMesh horizontal = makeSheet(1, 0.4, 0.0);
  SimpleMesh vertical = makeSheet(1, 0.4, 0.0);
  for (Vec3& p : vertical.positions) p = Vec3(p[0], p[2] + 0.01, p[1]);  // rotate into a wall
  const SimpleMesh both = combine(horizontal, vertical);
  const TriMesh mesh = toMesh(both);
  const BvhTree bvh = BvhTree::build(mesh, both.positions, 0.0);

  const auto found = detectIntersections(mesh, both.positions, bvh);
  std::vector<std::pair<int, int>> foundPairs;
  for (const auto& ixn : found) foundPairs.push_back({ixn.faceA, ixn.faceB});
  CHECK(foundPairs == oracleIntersectingPairs(mesh, both.positions));
  CHECK_FALSE(foundPairs.empty());
}

TEST_CASE("sphere poked through a sheet matches the oracle count") {
  const SimpleMesh sheet = makeSheet(16, 0.3, 0.0);
  const SimpleMesh sphere = makeSphere(10, 9, 0.05, Vec3(0.01, -0.005, 0.0031));
  const SimpleMesh both = combine(sheet, sphere);
  const TriMesh mesh = toMesh(both);
  const BvhTree bvh = BvhTree::build(mesh, both.positions, 0.0);

  const auto found = detectIntersections(mesh, both.positions, bvh);
  const auto expected = oracleIntersectingPairs(mesh, both.positions);
  CHECK(found.size() == expected.size());
  CHECK_FALSE(found.empty());
}

TEST_CASE("detection is symmetric under face permutation") {
  Rng rng(19);
  SimpleMesh a = makeSheet(6, 0.2, 0.0);
  SimpleMesh b = makeSheet(6, 0.2, 0.001);
  crumple(a.positions, rng, 0.01);
  crumple(b.positions, rng, 0.01);
  SimpleMesh both = combine(a, b);

  SimpleMesh reversed = both;
  std::reverse(reversed.faces.begin(), reversed.faces.end());

  const TriMesh mesh1 = toMesh(both);
  const TriMesh mesh2 = toMesh(reversed);
  const auto found1 =
      detectIntersections(mesh1, both.positions, BvhTree::build(mesh1, both.positions, 0.0));
  const auto found2 =
      detectIntersections(mesh2, reversed.positions, BvhTree::build(mesh2, reversed.positions, 0.0));

  const int last = static_cast<int>(both.faces.size()) - 1;
  std::vector<std::pair<int, int>> mapped;
  for (const auto& ixn : found2) {
    int fa = last - ixn.faceA, fb = last - ixn.faceB;
    if (fa > fb) std::swap(fa, fb);
    mapped.push_back({fa, fb});
  }
  std::sort(mapped.begin(), mapped.end());
  std::vector<std::pair<int, int>> original;
  for (const auto& ixn : found1) original.push_back({ixn.faceA, ixn.faceB});
  CHECK(original == mapped);
}

TEST_CASE("correspondence above face centroid") {
  SimpleMesh sheet = makeSheet(2, 0.2, 0.0);
  // add a detached probe node 5 mm above the centroid of face 0
  const TriMesh base = toMesh(sheet);
  const Face f0 = base.faces[0];
  const Vec3 centroid =
      (sheet.positions[f0[0]] + sheet.positions[f0[1]] + sheet.positions[f0[2]]) / 3.0;
  sheet.positions.push_back(centroid + Vec3(0, 0, 0.005));
  const int probe = static_cast<int>(sheet.positions.size()) - 1;
  // tie the probe into a far-away triangle so it is referenced by a face
  sheet.positions.push_back(centroid + Vec3(1.0, 0, 0.005));
  sheet.positions.push_back(centroid + Vec3(1.0, 0.1, 0.005));
  SimpleMesh withProbe = sheet;
  withProbe.faces.push_back({probe, probe + 1, probe + 2});
  const TriMesh mesh = toMesh(withProbe);

  const BvhTree bvh = BvhTree::build(mesh, withProbe.positions, 0.01);
  const auto corrs =
      findClothCorrespondences(mesh, withProbe.positions, withProbe.positions, bvh, 0.01);

  bool found = false;
  for (const Correspondence& c : corrs)
    if (c.node == probe && c.face == 0) {
      found = true;
      CHECK(c.dCurr == doctest::Approx(0.005));
      CHECK(c.dPrev == doctest::Approx(0.005));
    }
  CHECK(found);
}

TEST_CASE("projection outside the face yields no correspondence") {
  // two far-apart triangles in parallel planes, horizontally offset so the
  // projection of every node lands outside the other face
  SimpleMesh m;
  m.positions = {{0, 0, 0},     {0.1, 0, 0},     {0, 0.1, 0},
                 {0.5, 0, 0.005}, {0.6, 0, 0.005}, {0.5, 0.1, 0.005}};
  m.faces = {{0, 1, 2}, {3, 4, 5}};
  const TriMesh mesh = toMesh(m);
  const BvhTree bvh = BvhTree::build(mesh, m.positions, 0.01);
  CHECK(findClothCorrespondences(mesh, m.positions, m.positions, bvh, 0.01).empty());
}

TEST_CASE("randomized correspondences equal the brute-force scan") {
  Rng rng(23);
  for (int scene = 0; scene < 8; ++scene) {
    SimpleMesh a = makeSheet(7, 0.2, 0.0);
    SimpleMesh b = makeSheet(6, 0.18, 0.004);
    crumple(a.positions, rng, 0.006);
    crumple(b.positions, rng, 0.006);
    const SimpleMesh both = combine(a, b);
    const TriMesh mesh = toMesh(both);

    const double eps = 0.01;
    const BvhTree bvh = BvhTree::build(mesh, both.positions, eps);
    const auto corrs = findClothCorrespondences(mesh, both.positions, both.positions, bvh, eps);
    std::vector<std::pair<int, int>> found;
    for (const Correspondence& c : corrs) found.push_back({c.node, c.face});
    std::sort(found.begin(), found.end());

    auto expected = oracleCorrespondences(mesh, both.positions, eps);
    std::sort(expected.begin(), expected.end());
    CHECK(found == expected);
    CHECK_FALSE(found.empty());
  }
}

TEST_CASE("dPrev falls back to the current side when the pair is new") {
  SimpleMesh sheet = makeSheet(2, 0.2, 0.0);
  const TriMesh base = toMesh(sheet);
  const Face f0 = base.faces[0];
  const Vec3 centroid =
      (sheet.positions[f0[0]] + sheet.positions[f0[1]] + sheet.positions[f0[2]]) / 3.0;
  SimpleMesh withProbe = sheet;
  withProbe.positions.push_back(centroid + Vec3(0, 0, -0.003));
  withProbe.positions.push_back(centroid + Vec3(1.0, 0, 0));
  withProbe.positions.push_back(centroid + Vec3(1.0, 0.1, 0));
  const int probe = static_cast<int>(sheet.positions.size());
  withProbe.faces.push_back({probe, probe + 1, probe + 2});
  const TriMesh mesh = toMesh(withProbe);

  // previous frame: probe far above the sheet, pair absent
  Positions prev = withProbe.positions;
  prev[probe] = centroid + Vec3(0, 0, 0.5);

  const double eps = 0.01;
  const BvhTree bvh = BvhTree::build(mesh, withProbe.positions, eps);
  const auto corrs = findClothCorrespondences(mesh, withProbe.positions, prev, bvh, eps);
  bool found = false;
  for (const Correspondence& c : corrs)
    if (c.node == probe && c.face == 0) {
      found = true;
      CHECK(c.dCurr == doctest::Approx(-0.003));
      CHECK(c.dPrev == doctest::Approx(-eps));  // sign(dCurr) * eps
    }
  CHECK(found);
}

TEST_CASE("body edges: nearest node within threshold") {
  const SimpleMesh body = makeSphere(8, 6, 0.1, Vec3(0, 0, 0));
  const TriMesh bodyMesh = toMesh(body);
  const BvhTree bodyBvh = BvhTree::build(bodyMesh, body.positions, 0.03);

  // node 1 cm outside the north pole
  const Positions garment = {Vec3(0, 0, 0.11), Vec3(0, 0, 0.2)};
  const auto edges = findBodyEdges(garment, bodyMesh, body.positions, bodyBvh, 0.03);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].first == 0);
  CHECK(edges[0].second == 0);  // the pole vertex

  // node 4 cm away from everything: beyond the 3 cm default
  const Positions far = {Vec3(0, 0, 0.14)};
  CHECK(findBodyEdges(far, bodyMesh, body.positions, bodyBvh, 0.03).empty());
}

TEST_CASE("randomized body edges equal the brute-force scan") {
  Rng rng(31);
  const SimpleMesh body = makeSphere(12, 9, 0.12, Vec3(0, 0, 0));
  const TriMesh bodyMesh = toMesh(body);
  const BvhTree bodyBvh = BvhTree::build(bodyMesh, body.positions, 0.03);

  std::uniform_real_distribution<double> dist(-0.18, 0.18);
  for (int scene = 0; scene < 6; ++scene) {
    Positions garment;
    for (int v = 0; v < 150; ++v) garment.push_back(Vec3(dist(rng), dist(rng), dist(rng)));
    auto found = findBodyEdges(garment, bodyMesh, body.positions, bodyBvh, 0.03);
    auto expected = oracleBodyEdges(garment, body.positions, 0.03);
    std::sort(found.begin(), found.end());
    std::sort(expected.begin(), expected.end());
    CHECK(found == expected);
  }
}
