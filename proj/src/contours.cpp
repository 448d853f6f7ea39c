// SPDX-License-Identifier: Apache-2.0
#include "ccloth/contours.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <queue>
#include <set>

namespace ccloth {

namespace {

using CrossKey = std::tuple<int, int, int>;  // (edge lo, edge hi, host face)

CrossKey keyOf(const EdgeFaceCrossing& c) {
  const int lo = std::min(c.edge[0], c.edge[1]);
  const int hi = std::max(c.edge[0], c.edge[1]);
  return {lo, hi, c.hostFace};
}

std::vector<int> sortedFaceNodes(const std::vector<TriPairIntersection>& intersections,
                                 const std::vector<int>& segments, const TriMesh& mesh) {
  std::vector<int> nodes;
  for (int s : segments) {
    for (int v : mesh.faces[intersections[s].faceA]) nodes.push_back(v);
    for (int v : mesh.faces[intersections[s].faceB]) nodes.push_back(v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace

std::vector<IntersectionContour> makeContours(const std::vector<TriPairIntersection>& intersections,
                                              const TriMesh& mesh) {
  const int n = static_cast<int>(intersections.size());
  std::vector<IntersectionContour> contours;
  if (n == 0) return contours;

  // Crossings with the same (edge, host face) are the same physical point, so
  // the contour polyline continues across them. Member lists stay sorted.
  std::map<CrossKey, std::vector<int>> members;
  for (int i = 0; i < n; ++i)
    for (const EdgeFaceCrossing& c : intersections[i].crossings) members[keyOf(c)].push_back(i);

  // Connected components over shared crossings.
  std::vector<int> component(n, -1);
  int componentCount = 0;
  for (int seed = 0; seed < n; ++seed) {
    if (component[seed] >= 0) continue;
    std::queue<int> frontier;
    frontier.push(seed);
    component[seed] = componentCount;
    while (!frontier.empty()) {
      const int i = frontier.front();
      frontier.pop();
      for (const EdgeFaceCrossing& c : intersections[i].crossings)
        for (int j : members[keyOf(c)])
          if (component[j] < 0) {
            component[j] = componentCount;
            frontier.push(j);
          }
    }
    ++componentCount;
  }

  std::vector<std::vector<int>> componentMembers(componentCount);
  for (int i = 0; i < n; ++i) componentMembers[component[i]].push_back(i);

  for (const std::vector<int>& comp : componentMembers) {
    IntersectionContour contour;

    bool branched = false;
    std::vector<std::pair<CrossKey, int>> endpoints;  // keys held by exactly one member
    for (int i : comp)
      for (const EdgeFaceCrossing& c : intersections[i].crossings) {
        const auto& m = members[keyOf(c)];
        if (m.size() > 2) branched = true;
        if (m.size() == 1) endpoints.push_back({keyOf(c), i});
      }

    if (branched) {
      // Non-manifold pathology: keep the whole component as one open contour.
      contour.segments = comp;
      contour.closed = false;
    } else {
      std::sort(endpoints.begin(), endpoints.end());
      const bool loop = endpoints.empty();
      int start = loop ? comp.front() : endpoints.front().second;
      CrossKey entry = loop ? keyOf(intersections[start].crossings[0]) : endpoints.front().first;

      std::vector<char> visited(n, 0);
      int cur = start;
      for (;;) {
        contour.segments.push_back(cur);
        visited[cur] = 1;
        const CrossKey k0 = keyOf(intersections[cur].crossings[0]);
        const CrossKey k1 = keyOf(intersections[cur].crossings[1]);
        const CrossKey exit = (k0 == entry) ? k1 : k0;
        const auto& m = members.at(exit);
        int next = -1;
        for (int j : m)
          if (j != cur) next = j;
        if (next < 0) break;  // open end
        if (next == start) {
          contour.closed = loop;
          break;
        }
        if (visited[next]) break;
        entry = exit;
        cur = next;
      }
      // Defensive: anything the walk missed joins as unordered extras and the
      // contour stays open.
      if (contour.segments.size() != comp.size()) {
        contour.closed = false;
        for (int i : comp)
          if (!visited[i]) contour.segments.push_back(i);
      }
    }

    contour.touchedNodes = sortedFaceNodes(intersections, contour.segments, mesh);
    contours.push_back(std::move(contour));
  }
  return contours;
}

SplitResult splitByClosedContour(const IntersectionContour& contour,
                                 const std::vector<TriPairIntersection>& intersections,
                                 const TriMesh& mesh) {
  SplitResult result;

  std::set<int> cutEdges;
  std::set<int> touchedComponents;
  for (int s : contour.segments) {
    const TriPairIntersection& ixn = intersections[s];
    for (const EdgeFaceCrossing& c : ixn.crossings) {
      const int e = mesh.edgeIndex(c.edge[0], c.edge[1]);
      if (e >= 0) cutEdges.insert(e);
    }
    touchedComponents.insert(mesh.faceComponent[ixn.faceA]);
    touchedComponents.insert(mesh.faceComponent[ixn.faceB]);
  }

  // Flood fill faces of the pierced components without crossing cut edges.
  std::vector<int> part(mesh.faceCount(), -1);
  std::vector<std::vector<int>> partFaces;
  for (int seed = 0; seed < mesh.faceCount(); ++seed) {
    if (part[seed] >= 0 || !touchedComponents.count(mesh.faceComponent[seed])) continue;
    const int id = static_cast<int>(partFaces.size());
    partFaces.emplace_back();
    std::queue<int> frontier;
    frontier.push(seed);
    part[seed] = id;
    while (!frontier.empty()) {
      const int f = frontier.front();
      frontier.pop();
      partFaces[id].push_back(f);
      for (int k = 0; k < 3; ++k) {
        const int e = mesh.faceEdges[f][k];
        if (cutEdges.count(e)) continue;
        for (int g : mesh.edgeFaces[e])
          if (part[g] < 0) {
            part[g] = id;
            frontier.push(g);
          }
      }
    }
  }

  auto partNodes = [&](const std::vector<int>& faces) {
    std::vector<int> nodes;
    for (int f : faces)
      for (int v : mesh.faces[f]) nodes.push_back(v);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
  };

  // Per pierced component pick the smaller side as inside; a component that
  // did not split contributes nothing.
  std::set<int> insideSet, allNodes;
  for (int comp : touchedComponents) {
    std::vector<int> sides;
    for (int id = 0; id < static_cast<int>(partFaces.size()); ++id)
      if (!partFaces[id].empty() && mesh.faceComponent[partFaces[id].front()] == comp)
        sides.push_back(id);
    std::vector<std::vector<int>> sideNodes;
    for (int id : sides) {
      sideNodes.push_back(partNodes(partFaces[id]));
      for (int v : sideNodes.back()) allNodes.insert(v);
    }
    if (sides.size() < 2) continue;

    int best = 0;
    for (int k = 1; k < static_cast<int>(sides.size()); ++k) {
      const auto& cand = sideNodes[k];
      const auto& cur = sideNodes[best];
      if (cand.size() < cur.size() ||
          (cand.size() == cur.size() && cand.front() < cur.front()))
        best = k;
    }
    for (int v : sideNodes[best]) insideSet.insert(v);
    result.ok = true;
  }

  if (!result.ok) return result;  // SplitFailed: caller demotes the contour

  result.insideNodes.assign(insideSet.begin(), insideSet.end());
  for (int v : allNodes)
    if (!insideSet.count(v)) result.outsideNodes.push_back(v);
  return result;
}

void resolveContourInteriors(std::vector<IntersectionContour>& contours,
                             const std::vector<TriPairIntersection>& intersections,
                             const TriMesh& mesh) {
  for (IntersectionContour& contour : contours) {
    if (!contour.closed) continue;
    SplitResult split = splitByClosedContour(contour, intersections, mesh);
    if (split.ok) {
      contour.insideNodes = std::move(split.insideNodes);
    } else {
      contour.closed = false;
      contour.insideNodes.clear();
    }
  }
}

std::vector<IntersectionContour> removeNested(std::vector<IntersectionContour> contours) {
  const int n = static_cast<int>(contours.size());
  std::vector<char> dropped(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!contours[i].closed) continue;
    for (int j = 0; j < n && !dropped[i]; ++j) {
      if (j == i || !contours[j].closed) continue;
      const auto& inside = contours[j].insideNodes;
      const auto& touched = contours[i].touchedNodes;
      if (touched.empty()) continue;
      dropped[i] = std::includes(inside.begin(), inside.end(), touched.begin(), touched.end());
    }
  }
  std::vector<IntersectionContour> kept;
  for (int i = 0; i < n; ++i)
    if (!dropped[i]) kept.push_back(std::move(contours[i]));
  return kept;
}

NodeClassification classifyNodes(const std::vector<IntersectionContour>& contours,
                                 const TriMesh& mesh) {
  NodeClassification cls;
  cls.perNode.assign(mesh.vertexCount(), NodeClass::Repelled);
  for (const IntersectionContour& contour : contours) {
    const std::vector<int>& marked = contour.closed ? contour.insideNodes : contour.touchedNodes;
    for (int v : marked) cls.perNode[v] = NodeClass::NonRepelled;
  }
  return cls;
}

void classifyCorrespondences(std::vector<Correspondence>& correspondences,
                             const NodeClassification& classification, const TriMesh& mesh) {
  for (Correspondence& corr : correspondences) {
    const Face& face = mesh.faces[corr.face];
    corr.repulsive = classification.repelled(corr.node) && classification.repelled(face[0]) &&
                     classification.repelled(face[1]) && classification.repelled(face[2]);
  }
}

void writeContourObj(std::ostream& out, const std::vector<IntersectionContour>& contours,
                     const std::vector<TriPairIntersection>& intersections) {
  int vertexBase = 1;
  int id = 0;
  for (const IntersectionContour& contour : contours) {
    out << "o contour_" << id++ << (contour.closed ? "_closed" : "_open") << "\n";
    int count = 0;
    for (int s : contour.segments) {
      for (const EdgeFaceCrossing& c : intersections[s].crossings) {
        const Vec3& p = c.point;
        out << "v " << p[0] << " " << p[1] << " " << p[2] << "\n";
        ++count;
      }
    }
    out << "l";
    for (int k = 0; k < count; ++k) out << " " << vertexBase + k;
    out << "\n";
    vertexBase += count;
  }
}

}  // namespace ccloth
