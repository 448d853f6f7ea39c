// SPDX-License-Identifier: Apache-2.0
#include "ccloth/mesh.hpp"

#include <algorithm>
#include <queue>

namespace ccloth {

namespace {

std::uint64_t edgeKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

int TriMesh::edgeIndex(int a, int b) const {
  auto it = edgeLookup_.find(edgeKey(a, b));
  return it == edgeLookup_.end() ? -1 : it->second;
}

bool TriMesh::facesShareVertex(int fa, int fb) const {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (faces[fa][i] == faces[fb][j]) return true;
  return false;
}

double faceArea(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 faceNormal(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double area = 0.5 * n.norm();
  if (area <= kAreaTolerance) fail(ErrorCode::ZeroAreaFace, "face area below tolerance");
  return n / (2.0 * area);
}

Vec3 faceNormal(const TriMesh& mesh, int faceIdx, std::span<const Vec3> positions) {
  const Face& f = mesh.faces[faceIdx];
  return faceNormal(positions[f[0]], positions[f[1]], positions[f[2]]);
}

TriMesh buildTopology(Positions positions, std::vector<Face> faces, double density) {
  TriMesh mesh;
  const int nv = static_cast<int>(positions.size());
  const int nf = static_cast<int>(faces.size());

  for (int f = 0; f < nf; ++f) {
    const Face& face = faces[f];
    for (int k = 0; k < 3; ++k)
      if (face[k] < 0 || face[k] >= nv)
        fail(ErrorCode::IndexOutOfRange,
             "face " + std::to_string(f) + " references vertex " + std::to_string(face[k]));
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " repeats a vertex");
  }

  mesh.restPositions = std::move(positions);
  mesh.faces = std::move(faces);
  mesh.density = density;

  // Edge list in lexicographic (v0, v1) order for deterministic ids.
  std::vector<Edge> allEdges;
  allEdges.reserve(nf * 3);
  for (const Face& face : mesh.faces)
    for (int k = 0; k < 3; ++k) allEdges.push_back(makeEdge(face[k], face[(k + 1) % 3]));
  std::sort(allEdges.begin(), allEdges.end());
  allEdges.erase(std::unique(allEdges.begin(), allEdges.end()), allEdges.end());
  mesh.edges = std::move(allEdges);
  mesh.edgeLookup_.reserve(mesh.edges.size() * 2);
  for (int e = 0; e < mesh.edgeCount(); ++e)
    mesh.edgeLookup_[edgeKey(mesh.edges[e][0], mesh.edges[e][1])] = e;

  mesh.edgeFaces.assign(mesh.edgeCount(), {});
  mesh.faceEdges.assign(nf, {});
  mesh.vertexFaces.assign(nv, {});
  for (int f = 0; f < nf; ++f) {
    const Face& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.edgeIndex(face[k], face[(k + 1) % 3]);
      mesh.faceEdges[f][k] = e;
      mesh.edgeFaces[e].push_back(f);
      mesh.vertexFaces[face[k]].push_back(f);
    }
  }
  for (const auto& ef : mesh.edgeFaces)
    if (ef.size() > 2) mesh.nonManifold = true;

  // Bending hinges on exactly-two-face edges; opposite vertices in the order
  // of the incident faces.
  for (int e = 0; e < mesh.edgeCount(); ++e) {
    if (mesh.edgeFaces[e].size() != 2) continue;
    Hinge h;
    h.edge = e;
    h.x0 = mesh.edges[e][0];
    h.x1 = mesh.edges[e][1];
    auto opposite = [&](int f) {
      for (int k = 0; k < 3; ++k) {
        const int v = mesh.faces[f][k];
        if (v != h.x0 && v != h.x1) return v;
      }
      return -1;
    };
    h.x2 = opposite(mesh.edgeFaces[e][0]);
    h.x3 = opposite(mesh.edgeFaces[e][1]);
    mesh.hinges.push_back(h);
  }

  // Uniform 1/3-area mass lumping; conserves total mass exactly.
  mesh.vertexMass.assign(nv, 0.0);
  for (const Face& face : mesh.faces) {
    const double third = density *
                         faceArea(mesh.restPositions[face[0]], mesh.restPositions[face[1]],
                                  mesh.restPositions[face[2]]) /
                         3.0;
    for (int k = 0; k < 3; ++k) mesh.vertexMass[face[k]] += third;
  }

  // Connected components over face adjacency (shared edge).
  mesh.faceComponent.assign(nf, -1);
  mesh.vertexComponent.assign(nv, -1);
  int comp = 0;
  for (int seed = 0; seed < nf; ++seed) {
    if (mesh.faceComponent[seed] >= 0) continue;
    std::queue<int> frontier;
    frontier.push(seed);
    mesh.faceComponent[seed] = comp;
    while (!frontier.empty()) {
      const int f = frontier.front();
      frontier.pop();
      for (int k = 0; k < 3; ++k) {
        for (int g : mesh.edgeFaces[mesh.faceEdges[f][k]]) {
          if (mesh.faceComponent[g] < 0) {
            mesh.faceComponent[g] = comp;
            frontier.push(g);
          }
        }
      }
    }
    ++comp;
  }
  mesh.componentCount = comp;
  for (int f = 0; f < nf; ++f)
    for (int v : mesh.faces[f]) mesh.vertexComponent[v] = mesh.faceComponent[f];

  return mesh;
}

void validatePieces(const TriMesh& mesh, const std::vector<GarmentPiece>& pieces) {
  std::vector<char> vseen(mesh.vertexCount(), 0), fseen(mesh.faceCount(), 0);
  for (const GarmentPiece& p : pieces) {
    if (p.vertexBegin < 0 || p.vertexEnd > mesh.vertexCount() || p.vertexBegin > p.vertexEnd ||
        p.faceBegin < 0 || p.faceEnd > mesh.faceCount() || p.faceBegin > p.faceEnd)
      fail(ErrorCode::BadPieceLayout, "piece '" + p.label + "' range out of bounds");
    for (int v = p.vertexBegin; v < p.vertexEnd; ++v) {
      if (vseen[v]) fail(ErrorCode::BadPieceLayout, "vertex ranges overlap");
      vseen[v] = 1;
    }
    for (int f = p.faceBegin; f < p.faceEnd; ++f) {
      if (fseen[f]) fail(ErrorCode::BadPieceLayout, "face ranges overlap");
      fseen[f] = 1;
    }
  }
  for (char s : vseen)
    if (!s) fail(ErrorCode::BadPieceLayout, "vertex ranges do not cover the mesh");
  for (char s : fseen)
    if (!s) fail(ErrorCode::BadPieceLayout, "face ranges do not cover the mesh");
}

}  // namespace ccloth
