// SPDX-License-Identifier: Apache-2.0
#include "ccloth/energy.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace ccloth;
using namespace ccloth::testing;

namespace {

Positions zeros(int n) { return Positions(n, Vec3::Zero()); }

}  // namespace

TEST_CASE("stretching: rest length gives zero energy and gradient") {
  const Positions pos = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const TriMesh mesh = buildTopology(pos, {{0, 1, 2}}, 1.0);
  const RestState rest = makeRestState(mesh);
  MaterialParams params;
  params.stretchStiffness = 100.0;

  Positions grad = zeros(3);
  CHECK(stretchingEnergy(mesh, rest, pos, params, grad) == doctest::Approx(0.0));
  for (const Vec3& g : grad) CHECK(g.norm() == doctest::Approx(0.0));
}

TEST_CASE("stretching: edge stretched from 1.0 to 1.1 m at k=100 stores 0.5 J") {
  const Positions restPos = {{0, 0, 0}, {1, 0, 0}, {0.5, 0.5, 0}};
  const TriMesh mesh = buildTopology(restPos, {{0, 1, 2}}, 1.0);
  const RestState rest = makeRestState(mesh);
  MaterialParams params;
  params.stretchStiffness = 100.0;

  Positions pos = restPos;
  pos[1] = Vec3(1.1, 0, 0);
  Positions grad = zeros(3);
  const double e = stretchingEnergy(mesh, rest, pos, params, grad);

  // per-edge formula: the (0,1) edge alone contributes 0.5 J
  double expected = 0.0;
  for (int k = 0; k < mesh.edgeCount(); ++k) {
    const double len = (pos[mesh.edges[k][0]] - pos[mesh.edges[k][1]]).norm();
    const double s = len - rest.edgeRestLength[k];
    expected += 0.5 * 100.0 * s * s;
  }
  CHECK(e == doctest::Approx(expected));
  const int e01 = mesh.edgeIndex(0, 1);
  const double len01 = (pos[0] - pos[1]).norm();
  const double s01 = len01 - rest.edgeRestLength[e01];
  CHECK(0.5 * 100.0 * s01 * s01 == doctest::Approx(0.5));
}

TEST_CASE("bending: flat rest and flat current give zero") {
  const Positions pos = {{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, -1, 0}};
  const TriMesh mesh = buildTopology(pos, {{0, 1, 2}, {1, 0, 3}}, 1.0);
  const RestState rest = makeRestState(mesh);
  MaterialParams params;
  params.bendStiffness = 1.0;

  Positions grad = zeros(4);
  CHECK(bendingEnergy(mesh, rest, pos, params, grad) == doctest::Approx(0.0));
}

TEST_CASE("bending: hinge folded to 90 degrees from flat rest stores (pi/2)^2") {
  const Positions restPos = {{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, -1, 0}};
  const TriMesh mesh = buildTopology(restPos, {{0, 1, 2}, {1, 0, 3}}, 1.0);
  const RestState rest = makeRestState(mesh);
  MaterialParams params;
  params.bendStiffness = 1.0;

  Positions folded = restPos;
  folded[3] = Vec3(0.5, 0, -1);  // opposite vertex rotated 90 degrees about the hinge
  Positions grad = zeros(4);
  const double e = bendingEnergy(mesh, rest, folded, params, grad);
  CHECK(e == doctest::Approx(M_PI * M_PI / 4.0).epsilon(1e-9));
}

TEST_CASE("inertia vanishes at the ballistic prediction") {
  const Positions prev = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const TriMesh mesh = buildTopology(prev, {{0, 1, 2}}, 0.3);
  const double dt = 1.0 / 30.0;
  const Positions vel(3, Vec3(0.3, -0.1, 0.9));
  Positions pos = prev;
  for (int v = 0; v < 3; ++v) pos[v] += dt * vel[v];

  Positions grad = zeros(3);
  CHECK(inertiaEnergy(mesh, pos, prev, vel, dt, grad) == doctest::Approx(0.0));
  for (const Vec3& g : grad) CHECK(g.norm() < 1e-12);
}

TEST_CASE("gravity plus inertia is minimized exactly at the ballistic update") {
  const Positions prev = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const TriMesh mesh = buildTopology(prev, {{0, 1, 2}}, 0.3);
  const double dt = 1.0 / 30.0;
  const Positions vel(3, Vec3(0.1, 0.2, -0.05));
  MaterialParams params;

  Positions pos = prev;
  for (int v = 0; v < 3; ++v) pos[v] += dt * vel[v] + dt * dt * params.gravity;

  Positions grad = zeros(3);
  gravityInertiaEnergy(mesh, pos, prev, vel, dt, params, grad);
  for (const Vec3& g : grad) CHECK(g.norm() < 1e-12);
}

TEST_CASE("body collision penalty activation") {
  const SimpleMesh body = makeSphere(12, 9, 0.1, Vec3(0, 0, 0));
  const TriMesh bodyMesh = toMesh(body);
  const BvhTree bodyBvh = BvhTree::build(bodyMesh, body.positions, 0.0);
  MaterialParams params;
  params.bodyMargin = 0.002;
  params.bodyCollisionStiffness = 1.0;

  SUBCASE("node 5 mm outside at 2 mm margin: zero") {
    const Positions garment = {Vec3(0, 0, 0.105)};
    Positions grad = zeros(1);
    CHECK(bodyCollisionEnergy(garment, bodyMesh, body.positions, bodyBvh, params, grad) ==
          doctest::Approx(0.0));
  }
  SUBCASE("node at half margin: (margin/2)^3 times stiffness") {
    const ClosestPointHit probeHit =
        bodyBvh.closestPoint(Vec3(0, 0, 0.101), bodyMesh, body.positions);
    const Vec3 n = faceNormal(bodyMesh, probeHit.face, body.positions);
    const Positions garment = {probeHit.point + 0.001 * n};
    Positions grad = zeros(1);
    const double e = bodyCollisionEnergy(garment, bodyMesh, body.positions, bodyBvh, params, grad);
    CHECK(e == doctest::Approx(std::pow(0.001, 3)).epsilon(1e-6));
    // descending -grad moves the node outward along the face normal
    CHECK(grad[0].dot(n) < 0.0);
  }
}

TEST_CASE("repulsion term values and sign logic") {
  const Positions pos = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.2, 0.2, 0.002}};
  const TriMesh mesh = buildTopology(pos, {{0, 1, 2}, {1, 2, 3}}, 1.0);

  Correspondence corr;
  corr.node = 3;
  corr.face = 0;
  corr.normal = Vec3(0, 0, 1);
  corr.bary = Vec3(0.6, 0.2, 0.2);
  const double xi = 0.001;

  auto evalAt = [&](double height, double dPrev) {
    Positions p = pos;
    p[3][2] = height;
    Correspondence c = corr;
    c.dPrev = dPrev;
    Positions grad = zeros(4);
    const double e = repulsionEnergy({c}, mesh, p, xi, grad);
    return std::make_pair(e, grad);
  };

  SUBCASE("separated beyond threshold: zero") {
    CHECK(evalAt(0.002, 1.0).first == doctest::Approx(0.0));
  }
  SUBCASE("dCurr = 0.5 mm approached from above") {
    CHECK(evalAt(0.0005, 1.0).first == doctest::Approx(1.25e-10).epsilon(1e-9));
  }
  SUBCASE("node crossed the face: cubic grows and pushes back") {
    const auto [e, grad] = evalAt(-0.0005, 1.0);
    CHECK(e == doctest::Approx(3.375e-9).epsilon(1e-9));
    CHECK(grad[3][2] < 0.0);  // descent pushes the node back up
  }
  SUBCASE("monotone non-increasing in dCurr * sign(dPrev)") {
    double last = std::numeric_limits<double>::max();
    for (double h = -0.003; h <= 0.001; h += 0.0001) {
      const double e = evalAt(h, 1.0).first;
      CHECK(e <= last + 1e-18);
      last = e;
    }
  }
}

TEST_CASE("friction: no contacts and unit slide") {
  const Positions prev = {{0, 0, 0}};
  MaterialParams params;
  params.frictionCoeff = 1.0;

  Positions grad = zeros(1);
  CHECK(frictionEnergy(prev, prev, {}, params, grad) == doctest::Approx(0.0));

  FrictionContact contact;
  contact.node = 0;
  contact.normal = Vec3(0, 0, 1);
  const Positions pos = {{0.001, 0, 0}};  // 1 mm tangential slide
  grad = zeros(1);
  const double e = frictionEnergy(pos, prev, {contact}, params, grad);
  CHECK(e == doctest::Approx(0.5 * 1e-6));
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(55);
  const double h = 1e-6;
  MaterialParams params;
  params.stretchStiffness = 60.0;
  params.bendStiffness = 0.01;

  for (int trial = 0; trial < 10; ++trial) {
    SimpleMesh sheet = makeSheet(3, 0.2, 0.05);
    crumple(sheet.positions, rng, 0.02);
    const TriMesh mesh = toMesh(sheet);
    const RestState rest = makeRestState(mesh);
    const int nv = mesh.vertexCount();

    Positions pos = sheet.positions;
    crumple(pos, rng, 0.01);
    Positions prev = pos;
    crumple(prev, rng, 0.005);
    Positions vel(nv);
    std::uniform_real_distribution<double> vdist(-1.0, 1.0);
    for (Vec3& v : vel) v = Vec3(vdist(rng), vdist(rng), vdist(rng));

    {
      Positions grad = zeros(nv);
      stretchingEnergy(mesh, rest, pos, params, grad);
      const Positions fd = finiteDifferenceGradient(
          [&](const Positions& x) {
            Positions g = zeros(nv);
            return stretchingEnergy(mesh, rest, x, params, g);
          },
          pos, h);
      CHECK(maxRelativeError(grad, fd) < 1e-6);
      Vec3 sum = Vec3::Zero();
      for (const Vec3& g : grad) sum += g;
      CHECK(sum.norm() < 1e-10);  // translation equivariance
    }
    {
      Positions grad = zeros(nv);
      bendingEnergy(mesh, rest, pos, params, grad);
      const Positions fd = finiteDifferenceGradient(
          [&](const Positions& x) {
            Positions g = zeros(nv);
            return bendingEnergy(mesh, rest, x, params, g);
          },
          pos, h);
      CHECK(maxRelativeError(grad, fd) < 1e-6);
      Vec3 sum = Vec3::Zero();
      for (const Vec3& g : grad) sum += g;
      CHECK(sum.norm() < 1e-10);
    }
    {
      Positions grad = zeros(nv);
      gravityInertiaEnergy(mesh, pos, prev, vel, 1.0 / 30.0, params, grad);
      const Positions fd = finiteDifferenceGradient(
          [&](const Positions& x) {
            Positions g = zeros(nv);
            return gravityInertiaEnergy(mesh, x, prev, vel, 1.0 / 30.0, params, g);
          },
          pos, h);
      CHECK(maxRelativeError(grad, fd) < 1e-6);
    }
  }
}

TEST_CASE("repulsion and friction gradients match finite differences under freezing") {
  Rng rng(77);
  const double h = 1e-6;
  MaterialParams params;
  params.frictionCoeff = 0.7;
  const double xi = 0.002;

  int tested = 0;
  for (int trial = 0; trial < 8; ++trial) {
    SimpleMesh a = makeSheet(4, 0.15, 0.0);
    SimpleMesh b = makeSheet(4, 0.15, 0.0015);
    crumple(a.positions, rng, 0.002);
    crumple(b.positions, rng, 0.002);
    SimpleMesh both = a;
    const int base = static_cast<int>(a.positions.size());
    both.positions.insert(both.positions.end(), b.positions.begin(), b.positions.end());
    for (Face f : b.faces) both.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    const TriMesh mesh = toMesh(both);
    const int nv = mesh.vertexCount();

    Positions prev = both.positions;
    for (Vec3& p : prev) p += Vec3(0.001, -0.0005, 0.0008);

    const BvhTree bvh = BvhTree::build(mesh, both.positions, xi * 3.0);
    auto corrs = findClothCorrespondences(mesh, both.positions, prev, bvh, xi * 3.0);
    if (corrs.empty()) continue;
    ++tested;

    {
      Positions grad = zeros(nv);
      repulsionEnergy(corrs, mesh, both.positions, xi, grad);
      const Positions fd = finiteDifferenceGradient(
          [&](const Positions& x) {
            Positions g = zeros(nv);
            return repulsionEnergy(corrs, mesh, x, xi, g);  // frozen bary/normal
          },
          both.positions, h);
      CHECK(maxRelativeError(grad, fd) < 1e-6);
      Vec3 sum = Vec3::Zero();
      for (const Vec3& g : grad) sum += g;
      CHECK(sum.norm() < 1e-10);
    }
    {
      const auto contacts = gatherFrictionContacts(corrs, mesh, xi * 2.0, {}, params);
      if (contacts.empty()) continue;
      Positions grad = zeros(nv);
      frictionEnergy(both.positions, prev, contacts, params, grad);
      const Positions fd = finiteDifferenceGradient(
          [&](const Positions& x) {
            Positions g = zeros(nv);
            return frictionEnergy(x, prev, contacts, params, g);
          },
          both.positions, h);
      CHECK(maxRelativeError(grad, fd) < 1e-6);
    }
  }
  CHECK(tested >= 4);
}

TEST_CASE("body contact gradient matches finite differences with fixed assignment") {
  Rng rng(91);
  const double h = 1e-6;
  MaterialParams params;
  params.bodyMargin = 0.004;
  params.bodyCollisionStiffness = 800.0;

  const SimpleMesh body = makeSphere(12, 9, 0.1, Vec3(0, 0, 0));
  const TriMesh bodyMesh = toMesh(body);
  const BvhTree bodyBvh = BvhTree::build(bodyMesh, body.positions, 0.0);

  std::uniform_real_distribution<double> r(0.098, 0.105);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  Positions garment;
  for (int k = 0; k < 40; ++k) {
    const double phi = angle(rng) / 2.0, theta = angle(rng), rad = r(rng);
    garment.push_back(rad * Vec3(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                                 std::cos(phi)));
  }
  const auto contacts = findBodyContacts(garment, bodyMesh, body.positions, body.positions,
                                         bodyBvh, 2.0 * params.bodyMargin);
  REQUIRE_FALSE(contacts.empty());

  Positions grad = zeros(static_cast<int>(garment.size()));
  bodyCollisionPenalty(garment, contacts, params, grad);
  const Positions fd = finiteDifferenceGradient(
      [&](const Positions& x) {
        Positions g(x.size(), Vec3::Zero());
        return bodyCollisionPenalty(x, contacts, params, g);
      },
      garment, h);
  CHECK(maxRelativeError(grad, fd) < 1e-6);
}
