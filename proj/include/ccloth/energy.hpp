// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/collision.hpp"

#include <map>

namespace ccloth {

struct MaterialParams {
  double stretchStiffness = 100.0;      // N/m
  double bendStiffness = 1e-5;          // N*m
  double density = 0.2;                 // kg/m^2
  double bodyCollisionStiffness = 1e4;  // N/m^3
  double bodyMargin = 0.002;            // m
  double frictionCoeff = 0.3;
  Vec3 gravity{0.0, 0.0, -9.81};  // m/s^2
};

struct EnergyReport {
  double total = 0.0;
  std::map<std::string, double> perTerm;
  Positions gradient;  // dE/dx, N
};

// Rest quantities precomputed from the mesh rest positions.
struct RestState {
  std::vector<double> edgeRestLength;
  std::vector<double> hingeRestAngle;
};

RestState makeRestState(const TriMesh& mesh);

// Signed dihedral angle of a hinge, zero when flat.
double dihedralAngle(const Vec3& x0, const Vec3& x1, const Vec3& x2, const Vec3& x3);

// Every term returns its scalar value (J) and accumulates dE/dx into grad.
// Gradient buffers are per-vertex and must be pre-sized; accumulation order is
// fixed so results are bitwise reproducible for any worker-thread count.

double stretchingEnergy(const TriMesh& mesh, const RestState& rest,
                        std::span<const Vec3> positions, const MaterialParams& params,
                        std::span<Vec3> grad);

double bendingEnergy(const TriMesh& mesh, const RestState& rest, std::span<const Vec3> positions,
                     const MaterialParams& params, std::span<Vec3> grad);

double gravityEnergy(const TriMesh& mesh, std::span<const Vec3> positions,
                     const MaterialParams& params, std::span<Vec3> grad);

double inertiaEnergy(const TriMesh& mesh, std::span<const Vec3> positions,
                     std::span<const Vec3> prevPositions, std::span<const Vec3> velocities,
                     double dt, std::span<Vec3> grad);

// Inertia plus gravity: minimizing this together with the internal energies is
// the implicit-Euler incremental potential.
double gravityInertiaEnergy(const TriMesh& mesh, std::span<const Vec3> positions,
                            std::span<const Vec3> prevPositions, std::span<const Vec3> velocities,
                            double dt, const MaterialParams& params, std::span<Vec3> grad);

// Nearest-face contact assignment, frozen per gradient evaluation.
struct BodyContact {
  int node = -1;
  int face = -1;
  Vec3 normal = Vec3::Zero();  // body face normal, outward for outward-wound bodies
  Vec3 point = Vec3::Zero();   // closest body point at assignment time
  Vec3 surfaceDisp = Vec3::Zero();  // body point motion over the step
  double distance = 0.0;            // signed distance at assignment time
};

std::vector<BodyContact> findBodyContacts(std::span<const Vec3> garmentPositions,
                                          const TriMesh& bodyMesh,
                                          std::span<const Vec3> bodyPositions,
                                          std::span<const Vec3> bodyPrevPositions,
                                          const BvhTree& bodyBvh, double activationDistance);

// Cubic penalty max(bodyMargin - d, 0)^3 per contact, d the signed distance
// along the assigned body face normal.
double bodyCollisionPenalty(std::span<const Vec3> garmentPositions,
                            const std::vector<BodyContact>& contacts,
                            const MaterialParams& params, std::span<Vec3> grad);

double bodyCollisionEnergy(std::span<const Vec3> garmentPositions, const TriMesh& bodyMesh,
                           std::span<const Vec3> bodyPositions, const BvhTree& bodyBvh,
                           const MaterialParams& params, std::span<Vec3> grad);

// Repulsion: sum_i max(xi - dCurr_i * sign(dPrev_i), 0)^3 with dCurr recomputed
// from current positions against the correspondence's frozen projection
// geometry. The weighting coefficient is applied by the caller.
double repulsionEnergy(const std::vector<Correspondence>& repulsive, const TriMesh& mesh,
                       std::span<const Vec3> positions, double xi, std::span<Vec3> grad);

struct FrictionContact {
  int node = -1;
  Vec3 normal = Vec3::Zero();
  bool hasFace = false;              // cloth contact: slip measured against the face
  std::array<int, 3> faceVerts{};
  Vec3 bary = Vec3::Zero();
  Vec3 surfaceDisp = Vec3::Zero();   // imposed surface motion (body contacts)
};

std::vector<FrictionContact> gatherFrictionContacts(const std::vector<Correspondence>& correspondences,
                                                    const TriMesh& mesh, double xi,
                                                    const std::vector<BodyContact>& bodyContacts,
                                                    const MaterialParams& params);

// Quadratic penalty on tangential slip over the step, 0.5 * mu * |Pt dx|^2.
double frictionEnergy(std::span<const Vec3> positions, std::span<const Vec3> prevPositions,
                      const std::vector<FrictionContact>& contacts, const MaterialParams& params,
                      std::span<Vec3> grad);

}  // namespace ccloth
