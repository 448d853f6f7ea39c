// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace ccloth::testing {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Signed-area inside test, arcsim style.
bool insideByAreas(const Vec3& p, const std::array<Vec3, 3>& tri, const Vec3& n, double tol,
                   double& margin) {
  margin = std::numeric_limits<double>::max();
  for (int k = 0; k < 3; ++k) {
    const double a = n.dot((tri[(k + 1) % 3] - tri[k]).cross(p - tri[k]));
    margin = std::min(margin, a);
    if (a < -tol) return false;
  }
  return true;
}

}  // namespace

OracleSegment oracleTriTri(const std::array<Vec3, 3>& triA, const std::array<Vec3, 3>& triB) {
  OracleSegment result;
  const Vec3 nA = (triA[1] - triA[0]).cross(triA[2] - triA[0]);
  const Vec3 nB = (triB[1] - triB[0]).cross(triB[2] - triB[0]);
  if (nA.norm() < 1e-12 || nB.norm() < 1e-12) {
    result.uncertain = true;
    return result;
  }

  std::vector<Vec3> points;
  double minMargin = std::numeric_limits<double>::max();

  auto clipEdges = [&](const std::array<Vec3, 3>& tri, const std::array<Vec3, 3>& host,
                       const Vec3& n) {
    for (int k = 0; k < 3; ++k) {
      const Vec3& e0 = tri[k];
      const Vec3& e1 = tri[(k + 1) % 3];
      const double h0 = n.dot(e0 - host[0]);
      const double h1 = n.dot(e1 - host[0]);
      minMargin = std::min(minMargin, std::abs(h0));
      minMargin = std::min(minMargin, std::abs(h1));
      if (h0 * h1 >= 0.0) continue;  // no straddle
      const double t = h0 / (h0 - h1);
      const Vec3 p = e0 + t * (e1 - e0);
      double areaMargin = 0.0;
      if (insideByAreas(p, host, n, 0.0, areaMargin)) points.push_back(p);
      minMargin = std::min(minMargin, std::abs(areaMargin));
    }
  };
  clipEdges(triA, triB, nB);
  clipEdges(triB, triA, nA);

  // Degeneracy guard: configurations within 1e-9 of a vertex-on-plane or
  // point-on-border case are flagged rather than judged.
  const double scale = std::max(nA.norm(), nB.norm());
  if (minMargin < 1e-9 * std::max(1.0, scale)) result.uncertain = true;

  std::vector<Vec3> distinct;
  for (const Vec3& p : points) {
    bool dup = false;
    for (const Vec3& q : distinct)
      if ((p - q).norm() < 1e-9) dup = true;
    if (!dup) distinct.push_back(p);
  }
  if (distinct.size() == 2) {
    result.intersecting = true;
    result.p0 = distinct[0];
    result.p1 = distinct[1];
  } else if (distinct.size() > 2) {
    result.uncertain = true;
  }
  return result;
}

std::vector<std::pair<int, int>> oracleIntersectingPairs(const TriMesh& mesh,
                                                         std::span<const Vec3> positions) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < mesh.faceCount(); ++a)
    for (int b = a + 1; b < mesh.faceCount(); ++b) {
      if (mesh.facesShareVertex(a, b)) continue;
      if (triTriIntersect(mesh, positions, a, b)) pairs.push_back({a, b});
    }
  return pairs;
}

std::vector<std::pair<int, int>> oracleCorrespondences(const TriMesh& mesh,
                                                       std::span<const Vec3> positions,
                                                       double eps) {
  std::vector<std::pair<int, int>> result;
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    for (int f = 0; f < mesh.faceCount(); ++f) {
      const Face& face = mesh.faces[f];
      if (face[0] == v || face[1] == v || face[2] == v) continue;
      const Vec3& a = positions[face[0]];
      const Vec3& b = positions[face[1]];
      const Vec3& c = positions[face[2]];
      const Vec3 cross = (b - a).cross(c - a);
      if (0.5 * cross.norm() <= kAreaTolerance) continue;
      const Vec3 n = cross.normalized();
      const double d = (positions[v] - a).dot(n);
      if (std::abs(d) > eps) continue;
      // projection strictly inside: all three signed sub-areas positive
      const Vec3 foot = positions[v] - d * n;
      const double a0 = n.dot((b - a).cross(foot - a));
      const double a1 = n.dot((c - b).cross(foot - b));
      const double a2 = n.dot((a - c).cross(foot - c));
      if (a0 > 0.0 && a1 > 0.0 && a2 > 0.0) result.push_back({v, f});
    }
  }
  return result;
}

std::vector<std::pair<int, int>> oracleBodyEdges(std::span<const Vec3> garmentPositions,
                                                 std::span<const Vec3> bodyPositions,
                                                 double epsBody) {
  std::vector<std::pair<int, int>> result;
  for (std::size_t g = 0; g < garmentPositions.size(); ++g) {
    int best = -1;
    double bestDist = epsBody;
    for (std::size_t b = 0; b < bodyPositions.size(); ++b) {
      const double dist = (bodyPositions[b] - garmentPositions[g]).norm();
      if (dist < bestDist) {
        bestDist = dist;
        best = static_cast<int>(b);
      }
    }
    if (best >= 0) result.push_back({static_cast<int>(g), best});
  }
  return result;
}

std::vector<OracleContour> oracleContours(const std::vector<TriPairIntersection>& intersections) {
  const int n = static_cast<int>(intersections.size());
  std::map<std::tuple<int, int, int>, std::vector<int>> keys;
  for (int i = 0; i < n; ++i)
    for (const EdgeFaceCrossing& c : intersections[i].crossings)
      keys[{std::min(c.edge[0], c.edge[1]), std::max(c.edge[0], c.edge[1]), c.hostFace}]
          .push_back(i);

  UnionFind uf(n);
  for (const auto& [key, members] : keys)
    for (std::size_t k = 1; k < members.size(); ++k) uf.unite(members[0], members[k]);

  std::map<int, OracleContour> byRoot;
  for (int i = 0; i < n; ++i) byRoot[uf.find(i)].segments.insert(i);
  for (auto& [root, contour] : byRoot) contour.closed = true;
  for (const auto& [key, members] : keys)
    if (members.size() != 2) byRoot[uf.find(members[0])].closed = false;

  std::vector<OracleContour> result;
  for (auto& [root, contour] : byRoot) result.push_back(std::move(contour));
  return result;
}

std::vector<int> oracleCutComponents(const TriMesh& mesh, const std::set<int>& cutEdges,
                                     const std::set<int>& touchedMeshComponents) {
  UnionFind uf(mesh.faceCount());
  for (int e = 0; e < mesh.edgeCount(); ++e) {
    if (cutEdges.count(e)) continue;
    const auto& faces = mesh.edgeFaces[e];
    for (std::size_t k = 1; k < faces.size(); ++k) uf.unite(faces[0], faces[k]);
  }
  std::vector<int> part(mesh.faceCount(), -1);
  std::map<int, int> rootToPart;
  for (int f = 0; f < mesh.faceCount(); ++f) {
    if (!touchedMeshComponents.count(mesh.faceComponent[f])) continue;
    const int root = uf.find(f);
    auto [it, inserted] = rootToPart.insert({root, static_cast<int>(rootToPart.size())});
    part[f] = it->second;
  }
  return part;
}

Positions finiteDifferenceGradient(const std::function<double(const Positions&)>& f,
                                   const Positions& x, double h) {
  Positions grad(x.size(), Vec3::Zero());
  Positions probe = x;
  for (std::size_t v = 0; v < x.size(); ++v) {
    for (int k = 0; k < 3; ++k) {
      probe[v][k] = x[v][k] + h;
      const double fp = f(probe);
      probe[v][k] = x[v][k] - h;
      const double fm = f(probe);
      probe[v][k] = x[v][k];
      grad[v][k] = (fp - fm) / (2.0 * h);
    }
  }
  return grad;
}

double maxRelativeError(const Positions& analytic, const Positions& numeric) {
  double num = 0.0, den = 0.0;
  for (std::size_t v = 0; v < analytic.size(); ++v) {
    num = std::max(num, (analytic[v] - numeric[v]).norm());
    den = std::max(den, numeric[v].norm());
  }
  if (den < 1e-12) return num;  // absolute when the gradient is ~zero
  return num / den;
}

SimpleMesh makeSheet(int n, double size, double z, const Vec3& origin) {
  SimpleMesh m;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      m.positions.push_back(origin + Vec3((static_cast<double>(i) / n - 0.5) * size,
                                          (static_cast<double>(j) / n - 0.5) * size, z));
  auto id = [&](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

SimpleMesh makeSphere(int segments, int rings, double radius, const Vec3& center) {
  SimpleMesh m;
  m.positions.push_back(center + Vec3(0, 0, radius));
  for (int r = 1; r < rings; ++r) {
    const double phi = M_PI * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double theta = 2.0 * M_PI * s / segments;
      m.positions.push_back(center + radius * Vec3(std::sin(phi) * std::cos(theta),
                                                   std::sin(phi) * std::sin(theta),
                                                   std::cos(phi)));
    }
  }
  m.positions.push_back(center + Vec3(0, 0, -radius));
  const int south = static_cast<int>(m.positions.size()) - 1;
  auto ringId = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) m.faces.push_back({0, ringId(1, s + 1), ringId(1, s)});
  for (int r = 1; r < rings - 1; ++r)
    for (int s = 0; s < segments; ++s) {
      m.faces.push_back({ringId(r, s), ringId(r, s + 1), ringId(r + 1, s + 1)});
      m.faces.push_back({ringId(r, s), ringId(r + 1, s + 1), ringId(r + 1, s)});
    }
  for (int s = 0; s < segments; ++s)
    m.faces.push_back({south, ringId(rings - 1, s), ringId(rings - 1, s + 1)});
  return m;
}

void crumple(Positions& positions, Rng& rng, double amplitude) {
  std::uniform_real_distribution<double> dist(0.5, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  const double fx = dist(rng), fy = dist(rng), px = phase(rng), py = phase(rng);
  std::uniform_real_distribution<double> noise(-0.2 * amplitude, 0.2 * amplitude);
  for (Vec3& p : positions) {
    p[2] += amplitude * std::sin(fx * 20.0 * p[0] + px) * std::cos(fy * 20.0 * p[1] + py);
    p += Vec3(noise(rng), noise(rng), noise(rng));
  }
}

TriMesh toMesh(const SimpleMesh& m, double density) {
  return buildTopology(m.positions, m.faces, density);
}

}  // namespace ccloth::testing
