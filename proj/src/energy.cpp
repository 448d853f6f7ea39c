// SPDX-License-Identifier: Apache-2.0
#include "ccloth/energy.hpp"

#include "ccloth/geometry.hpp"
#include "ccloth/parallel.hpp"

#include <cmath>
#include <functional>

namespace ccloth {

namespace {

constexpr double kTinyLength = 1e-12;

// Parallel element loop with deterministic reduction: chunk-local energy sums
// and sparse gradient entries are merged in chunk order, so results match the
// serial evaluation bitwise.
struct GradScatter {
  std::vector<std::pair<int, Vec3>> entries;
  void add(int i, const Vec3& v) { entries.emplace_back(i, v); }
};

double forEachElement(std::size_t count, std::span<Vec3> grad,
                      const std::function<double(std::size_t, GradScatter&)>& element) {
  const std::size_t chunkSize = 128;
  const std::size_t chunks = chunkCount(count, chunkSize);
  std::vector<double> sums(chunks, 0.0);
  std::vector<GradScatter> scatters(chunks);

  parallelChunks(count, chunkSize, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) sums[c] += element(i, scatters[c]);
  });

  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += sums[c];
    for (const auto& [i, v] : scatters[c].entries) grad[i] += v;
  }
  return total;
}

}  // namespace

RestState makeRestState(const TriMesh& mesh) {
  RestState rest;
  rest.edgeRestLength.resize(mesh.edgeCount());
  for (int e = 0; e < mesh.edgeCount(); ++e)
    rest.edgeRestLength[e] =
        (mesh.restPositions[mesh.edges[e][0]] - mesh.restPositions[mesh.edges[e][1]]).norm();
  rest.hingeRestAngle.resize(mesh.hinges.size());
  for (std::size_t h = 0; h < mesh.hinges.size(); ++h) {
    const Hinge& hinge = mesh.hinges[h];
    rest.hingeRestAngle[h] =
        dihedralAngle(mesh.restPositions[hinge.x0], mesh.restPositions[hinge.x1],
                      mesh.restPositions[hinge.x2], mesh.restPositions[hinge.x3]);
  }
  return rest;
}

double dihedralAngle(const Vec3& x0, const Vec3& x1, const Vec3& x2, const Vec3& x3) {
  const Vec3 e = x1 - x0;
  const Vec3 n1 = e.cross(x2 - x0);
  const Vec3 n2 = (x3 - x0).cross(e);
  const double n1len = n1.norm(), n2len = n2.norm(), elen = e.norm();
  if (n1len < kTinyLength || n2len < kTinyLength || elen < kTinyLength) return 0.0;
  const double cosTheta = n1.dot(n2) / (n1len * n2len);
  const double sinTheta = n1.cross(n2).dot(e) / (n1len * n2len * elen);
  return std::atan2(sinTheta, cosTheta);
}

double stretchingEnergy(const TriMesh& mesh, const RestState& rest,
                        std::span<const Vec3> positions, const MaterialParams& params,
                        std::span<Vec3> grad) {
  const double k = params.stretchStiffness;
  return forEachElement(mesh.edgeCount(), grad, [&](std::size_t e, GradScatter& out) {
    const int i = mesh.edges[e][0], j = mesh.edges[e][1];
    const Vec3 d = positions[i] - positions[j];
    const double len = d.norm();
    const double stretch = len - rest.edgeRestLength[e];
    if (len > kTinyLength) {
      const Vec3 g = (k * stretch / len) * d;
      out.add(i, g);
      out.add(j, -g);
    }
    // zero-length edge: zero gradient direction (subgradient choice)
    return 0.5 * k * stretch * stretch;
  });
}

double bendingEnergy(const TriMesh& mesh, const RestState& rest, std::span<const Vec3> positions,
                     const MaterialParams& params, std::span<Vec3> grad) {
  const double kb = params.bendStiffness;
  return forEachElement(mesh.hinges.size(), grad, [&](std::size_t h, GradScatter& out) {
    const Hinge& hinge = mesh.hinges[h];
    const Vec3& x0 = positions[hinge.x0];
    const Vec3& x1 = positions[hinge.x1];
    const Vec3& x2 = positions[hinge.x2];
    const Vec3& x3 = positions[hinge.x3];

    const double theta = dihedralAngle(x0, x1, x2, x3);
    const double dev = theta - rest.hingeRestAngle[h];
    const double energy = kb * dev * dev;

    const Vec3 e = x1 - x0;
    const Vec3 n1 = e.cross(x2 - x0);
    const Vec3 n2 = (x3 - x0).cross(e);
    const double elen = e.norm();
    const double n1sq = n1.squaredNorm(), n2sq = n2.squaredNorm();
    // near-degenerate hinge: clamp the gradient to zero
    if (elen < kTinyLength || n1sq < kTinyLength || n2sq < kTinyLength) return energy;

    const Vec3 dTheta2 = (elen / n1sq) * n1;
    const Vec3 dTheta3 = (elen / n2sq) * n2;
    const Vec3 dTheta0 =
        -((x2 - x1).dot(e) / (elen * n1sq)) * n1 - ((x3 - x1).dot(e) / (elen * n2sq)) * n2;
    const Vec3 dTheta1 =
        ((x2 - x0).dot(e) / (elen * n1sq)) * n1 + ((x3 - x0).dot(e) / (elen * n2sq)) * n2;

    const double scale = 2.0 * kb * dev;
    out.add(hinge.x0, scale * dTheta0);
    out.add(hinge.x1, scale * dTheta1);
    out.add(hinge.x2, scale * dTheta2);
    out.add(hinge.x3, scale * dTheta3);
    return energy;
  });
}

double gravityEnergy(const TriMesh& mesh, std::span<const Vec3> positions,
                     const MaterialParams& params, std::span<Vec3> grad) {
  double total = 0.0;
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    total -= mesh.vertexMass[v] * params.gravity.dot(positions[v]);
    grad[v] -= mesh.vertexMass[v] * params.gravity;
  }
  return total;
}

double inertiaEnergy(const TriMesh& mesh, std::span<const Vec3> positions,
                     std::span<const Vec3> prevPositions, std::span<const Vec3> velocities,
                     double dt, std::span<Vec3> grad) {
  double total = 0.0;
  const double invDt2 = 1.0 / (dt * dt);
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    const Vec3 target = prevPositions[v] + dt * velocities[v];
    const Vec3 diff = positions[v] - target;
    total += 0.5 * mesh.vertexMass[v] * invDt2 * diff.squaredNorm();
    grad[v] += mesh.vertexMass[v] * invDt2 * diff;
  }
  return total;
}

double gravityInertiaEnergy(const TriMesh& mesh, std::span<const Vec3> positions,
                            std::span<const Vec3> prevPositions, std::span<const Vec3> velocities,
                            double dt, const MaterialParams& params, std::span<Vec3> grad) {
  return inertiaEnergy(mesh, positions, prevPositions, velocities, dt, grad) +
         gravityEnergy(mesh, positions, params, grad);
}

std::vector<BodyContact> findBodyContacts(std::span<const Vec3> garmentPositions,
                                          const TriMesh& bodyMesh,
                                          std::span<const Vec3> bodyPositions,
                                          std::span<const Vec3> bodyPrevPositions,
                                          const BvhTree& bodyBvh, double activationDistance) {
  const std::size_t nv = garmentPositions.size();
  const std::size_t chunkSize = 64;
  std::vector<std::vector<BodyContact>> perChunk(chunkCount(nv, chunkSize));

  parallelChunks(nv, chunkSize, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    for (std::size_t v = lo; v < hi; ++v) {
      const ClosestPointHit hit = bodyBvh.closestPoint(garmentPositions[v], bodyMesh, bodyPositions);
      if (hit.face < 0) continue;
      Vec3 n;
      try {
        n = faceNormal(bodyMesh, hit.face, bodyPositions);
      } catch (const Error&) {
        continue;
      }
      const double d = (garmentPositions[v] - hit.point).dot(n);
      if (d >= activationDistance) continue;

      BodyContact contact;
      contact.node = static_cast<int>(v);
      contact.face = hit.face;
      contact.normal = n;
      contact.point = hit.point;
      contact.distance = d;
      const Face& face = bodyMesh.faces[hit.face];
      const Vec3 bc = barycentric(hit.point, bodyPositions[face[0]], bodyPositions[face[1]],
                                  bodyPositions[face[2]]);
      contact.surfaceDisp = bc[0] * (bodyPositions[face[0]] - bodyPrevPositions[face[0]]) +
                            bc[1] * (bodyPositions[face[1]] - bodyPrevPositions[face[1]]) +
                            bc[2] * (bodyPositions[face[2]] - bodyPrevPositions[face[2]]);
      perChunk[c].push_back(contact);
    }
  });

  std::vector<BodyContact> contacts;
  for (const auto& chunk : perChunk) contacts.insert(contacts.end(), chunk.begin(), chunk.end());
  return contacts;
}

double bodyCollisionPenalty(std::span<const Vec3> garmentPositions,
                            const std::vector<BodyContact>& contacts,
                            const MaterialParams& params, std::span<Vec3> grad) {
  const double k = params.bodyCollisionStiffness;
  return forEachElement(contacts.size(), grad, [&](std::size_t i, GradScatter& out) {
    const BodyContact& contact = contacts[i];
    const double d = (garmentPositions[contact.node] - contact.point).dot(contact.normal);
    const double u = params.bodyMargin - d;
    if (u <= 0.0) return 0.0;
    out.add(contact.node, -3.0 * k * u * u * contact.normal);
    return k * u * u * u;
  });
}

double bodyCollisionEnergy(std::span<const Vec3> garmentPositions, const TriMesh& bodyMesh,
                           std::span<const Vec3> bodyPositions, const BvhTree& bodyBvh,
                           const MaterialParams& params, std::span<Vec3> grad) {
  const std::vector<BodyContact> contacts =
      findBodyContacts(garmentPositions, bodyMesh, bodyPositions, bodyPositions, bodyBvh,
                       2.0 * params.bodyMargin);
  return bodyCollisionPenalty(garmentPositions, contacts, params, grad);
}

double repulsionEnergy(const std::vector<Correspondence>& repulsive, const TriMesh& mesh,
                       std::span<const Vec3> positions, double xi, std::span<Vec3> grad) {
  return forEachElement(repulsive.size(), grad, [&](std::size_t i, GradScatter& out) {
    const Correspondence& corr = repulsive[i];
    const Face& face = mesh.faces[corr.face];
    const Vec3 foot = corr.bary[0] * positions[face[0]] + corr.bary[1] * positions[face[1]] +
                      corr.bary[2] * positions[face[2]];
    const double d = (positions[corr.node] - foot).dot(corr.normal);
    const double sign = corr.dPrev < 0.0 ? -1.0 : 1.0;
    const double u = xi - d * sign;
    if (u <= 0.0) return 0.0;

    const double scale = 3.0 * u * u * sign;
    out.add(corr.node, -scale * corr.normal);
    for (int k = 0; k < 3; ++k) out.add(face[k], scale * corr.bary[k] * corr.normal);
    return u * u * u;
  });
}

std::vector<FrictionContact> gatherFrictionContacts(const std::vector<Correspondence>& correspondences,
                                                    const TriMesh& mesh, double xi,
                                                    const std::vector<BodyContact>& bodyContacts,
                                                    const MaterialParams& params) {
  std::vector<FrictionContact> contacts;
  for (const Correspondence& corr : correspondences) {
    if (std::abs(corr.dCurr) >= xi) continue;
    FrictionContact fc;
    fc.node = corr.node;
    fc.normal = corr.normal;
    fc.hasFace = true;
    fc.faceVerts = mesh.faces[corr.face];
    fc.bary = corr.bary;
    contacts.push_back(fc);
  }
  for (const BodyContact& bc : bodyContacts) {
    if (std::abs(bc.distance) >= params.bodyMargin) continue;
    FrictionContact fc;
    fc.node = bc.node;
    fc.normal = bc.normal;
    fc.surfaceDisp = bc.surfaceDisp;
    contacts.push_back(fc);
  }
  return contacts;
}

double frictionEnergy(std::span<const Vec3> positions, std::span<const Vec3> prevPositions,
                      const std::vector<FrictionContact>& contacts, const MaterialParams& params,
                      std::span<Vec3> grad) {
  const double mu = params.frictionCoeff;
  return forEachElement(contacts.size(), grad, [&](std::size_t i, GradScatter& out) {
    const FrictionContact& contact = contacts[i];
    Vec3 rel = positions[contact.node] - prevPositions[contact.node];
    if (contact.hasFace) {
      for (int k = 0; k < 3; ++k)
        rel -= contact.bary[k] *
               (positions[contact.faceVerts[k]] - prevPositions[contact.faceVerts[k]]);
    } else {
      rel -= contact.surfaceDisp;
    }
    const Vec3 slip = rel - contact.normal.dot(rel) * contact.normal;
    out.add(contact.node, mu * slip);
    if (contact.hasFace)
      for (int k = 0; k < 3; ++k) out.add(contact.faceVerts[k], -mu * contact.bary[k] * slip);
    return 0.5 * mu * slip.squaredNorm();
  });
}

}  // namespace ccloth
