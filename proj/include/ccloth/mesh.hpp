// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/types.hpp"

#include <span>
#include <unordered_map>

namespace ccloth {

// Interior edge with its two opposite vertices, used for dihedral bending.
// Faces are (x0, x1, x2) and (x1, x0, x3) up to rotation.
struct Hinge {
  int edge;
  int x0, x1, x2, x3;
};

// Triangle mesh with derived topology and lumped vertex masses. Immutable
// after buildTopology; current vertex positions are passed separately so the
// solver can own mutable positions while topology is shared across threads.
struct TriMesh {
  Positions restPositions;
  std::vector<Face> faces;

  std::vector<Edge> edges;                    // unique undirected edges, lexicographic order
  std::vector<std::vector<int>> edgeFaces;    // incident faces per edge (1-2; >2 flags nonManifold)
  std::vector<std::array<int, 3>> faceEdges;  // edge ids per face corner i: edge (v_i, v_{i+1})
  std::vector<std::vector<int>> vertexFaces;  // incident faces per vertex, ascending
  std::vector<Hinge> hinges;                  // edges with exactly two incident faces
  std::vector<double> vertexMass;             // kg
  std::vector<int> faceComponent;             // connected component id per face
  std::vector<int> vertexComponent;           // component id per vertex (-1 if unreferenced)
  int componentCount = 0;
  bool nonManifold = false;
  double density = 0.0;  // kg/m^2 used for mass lumping

  int vertexCount() const { return static_cast<int>(restPositions.size()); }
  int faceCount() const { return static_cast<int>(faces.size()); }
  int edgeCount() const { return static_cast<int>(edges.size()); }

  // -1 when (a, b) is not a mesh edge.
  int edgeIndex(int a, int b) const;

  bool facesShareVertex(int fa, int fb) const;

 private:
  friend TriMesh buildTopology(Positions positions, std::vector<Face> faces, double density);
  std::unordered_map<std::uint64_t, int> edgeLookup_;
};

// Builds full topology and lumped masses (density x one third of the summed
// incident rest areas per vertex). Throws DegenerateFace / IndexOutOfRange.
TriMesh buildTopology(Positions positions, std::vector<Face> faces, double density);

// Unit normal with right-hand orientation from vertex order.
// Throws ZeroAreaFace when the doubled-area cross product is below tolerance.
Vec3 faceNormal(const Vec3& a, const Vec3& b, const Vec3& c);
Vec3 faceNormal(const TriMesh& mesh, int faceIdx, std::span<const Vec3> positions);

double faceArea(const Vec3& a, const Vec3& b, const Vec3& c);

// Contiguous vertex/face ranges of one garment within a combined outfit mesh.
struct GarmentPiece {
  int vertexBegin = 0, vertexEnd = 0;  // [begin, end)
  int faceBegin = 0, faceEnd = 0;
  std::string label;
};

// Ranges must be disjoint and cover the outfit mesh exactly; throws BadPieceLayout.
void validatePieces(const TriMesh& mesh, const std::vector<GarmentPiece>& pieces);

}  // namespace ccloth
