// SPDX-License-Identifier: Apache-2.0
#include "ccloth/graph.hpp"

#include <algorithm>
#include <ostream>

namespace ccloth {

int WorldGraph::openContours() const {
  return static_cast<int>(std::count_if(contours.begin(), contours.end(),
                                        [](const IntersectionContour& c) { return !c.closed; }));
}

int WorldGraph::closedContours() const {
  return static_cast<int>(contours.size()) - openContours();
}

WorldGraph buildInputGraph(const TriMesh& garment, std::span<const Vec3> positions,
                           std::span<const Vec3> prevPositions, const TriMesh* bodyMesh,
                           std::span<const Vec3> bodyPositions, const WorldGraphConfig& config) {
  WorldGraph graph;
  graph.garmentEdges = garment.edges;
  graph.nodeClass.perNode.assign(garment.vertexCount(), NodeClass::Repelled);
  if (garment.faceCount() == 0) return graph;

  if (bodyMesh && bodyMesh->faceCount() > 0) {
    const BvhTree bodyBvh = BvhTree::build(*bodyMesh, bodyPositions, config.epsBody);
    graph.bodyEdges = findBodyEdges(positions, *bodyMesh, bodyPositions, bodyBvh, config.epsBody);
  }

  const BvhTree dcdBvh = BvhTree::build(garment, positions, 0.0);
  graph.intersections = detectIntersections(garment, positions, dcdBvh);

  if (config.classifyInteractions) {
    graph.contours = makeContours(graph.intersections, garment);
    resolveContourInteriors(graph.contours, graph.intersections, garment);
    graph.contours = removeNested(std::move(graph.contours));
    graph.nodeClass = classifyNodes(graph.contours, garment);
  }

  const BvhTree proximityBvh = BvhTree::build(garment, positions, config.epsCloth);
  std::vector<Correspondence> correspondences =
      findClothCorrespondences(garment, positions, prevPositions, proximityBvh, config.epsCloth);
  if (config.classifyInteractions)
    classifyCorrespondences(correspondences, graph.nodeClass, garment);

  for (Correspondence& corr : correspondences) {
    if (corr.repulsive)
      graph.repulsiveWorld.push_back(std::move(corr));
    else
      graph.nonRepulsiveWorld.push_back(std::move(corr));
  }
  return graph;
}

void dumpWorldGraph(std::ostream& out, const WorldGraph& graph) {
  const auto flags = out.flags();
  out.precision(17);

  out << "worldgraph v1\n";
  out << "nodes " << graph.nodeClass.perNode.size() << "\n";
  out << "nonrepelled";
  for (std::size_t v = 0; v < graph.nodeClass.perNode.size(); ++v)
    if (graph.nodeClass.perNode[v] == NodeClass::NonRepelled) out << " " << v;
  out << "\n";

  out << "garment_edges " << graph.garmentEdges.size() << "\n";
  out << "body_edges " << graph.bodyEdges.size() << "\n";
  for (const auto& [g, b] : graph.bodyEdges) out << "be " << g << " " << b << "\n";

  auto writeWorld = [&](const char* tag, const std::vector<Correspondence>& list) {
    out << tag << " " << list.size() << "\n";
    for (const Correspondence& c : list)
      out << "we " << c.node << " " << c.face << " " << c.dCurr << " " << c.dPrev << " "
          << (c.repulsive ? 1 : 0) << "\n";
  };
  writeWorld("repulsive_world", graph.repulsiveWorld);
  writeWorld("nonrepulsive_world", graph.nonRepulsiveWorld);

  out << "contours " << graph.contours.size() << "\n";
  for (const IntersectionContour& contour : graph.contours) {
    out << "contour " << (contour.closed ? "closed" : "open") << " segments "
        << contour.segments.size() << " inside " << contour.insideNodes.size() << "\n";
    out << "polyline";
    for (int s : contour.segments)
      for (const EdgeFaceCrossing& c : graph.intersections[s].crossings)
        out << " " << c.point[0] << " " << c.point[1] << " " << c.point[2];
    out << "\n";
  }
  out.flags(flags);
}

}  // namespace ccloth
