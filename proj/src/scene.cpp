// SPDX-License-Identifier: Apache-2.0
#include "ccloth/scene.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace ccloth {

namespace {

struct MeshBuild {
  Positions positions;
  std::vector<Face> faces;
  std::vector<GarmentPiece> pieces;
};

// Regular (nu x nv)-cell grid mapped through `surface`; returns the index of
// vertex (i, j) as base + i * (nv + 1) + j.
int appendGrid(MeshBuild& out, int nu, int nv,
               const std::function<Vec3(double, double)>& surface, const std::string& label) {
  const int base = static_cast<int>(out.positions.size());
  const int faceBase = static_cast<int>(out.faces.size());
  for (int i = 0; i <= nu; ++i)
    for (int j = 0; j <= nv; ++j)
      out.positions.push_back(surface(static_cast<double>(i) / nu, static_cast<double>(j) / nv));
  auto id = [&](int i, int j) { return base + i * (nv + 1) + j; };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      out.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      out.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  out.pieces.push_back({base, static_cast<int>(out.positions.size()), faceBase,
                        static_cast<int>(out.faces.size()), label});
  return base;
}

void appendUvSphere(MeshBuild& out, int segments, int rings, double radius, const Vec3& center,
                    const std::string& label) {
  const int base = static_cast<int>(out.positions.size());
  const int faceBase = static_cast<int>(out.faces.size());
  out.positions.push_back(center + Vec3(0, 0, radius));  // north pole
  for (int r = 1; r < rings; ++r) {
    const double phi = M_PI * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double theta = 2.0 * M_PI * s / segments;
      out.positions.push_back(center + radius * Vec3(std::sin(phi) * std::cos(theta),
                                                     std::sin(phi) * std::sin(theta),
                                                     std::cos(phi)));
    }
  }
  out.positions.push_back(center + Vec3(0, 0, -radius));  // south pole
  const int south = static_cast<int>(out.positions.size()) - 1;
  auto ringId = [&](int r, int s) { return base + 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) out.faces.push_back({base, ringId(1, s + 1), ringId(1, s)});
  for (int r = 1; r < rings - 1; ++r)
    for (int s = 0; s < segments; ++s) {
      out.faces.push_back({ringId(r, s), ringId(r, s + 1), ringId(r + 1, s + 1)});
      out.faces.push_back({ringId(r, s), ringId(r + 1, s + 1), ringId(r + 1, s)});
    }
  for (int s = 0; s < segments; ++s)
    out.faces.push_back({south, ringId(rings - 1, s), ringId(rings - 1, s + 1)});
  out.pieces.push_back({base, static_cast<int>(out.positions.size()), faceBase,
                        static_cast<int>(out.faces.size()), label});
}

// Open surface of revolution around the z axis through the (radius, z)
// profile points, linearly subdivided.
void appendRevolution(MeshBuild& out, const std::vector<std::pair<double, double>>& profile,
                      int stepsPerSpan, int segments, const Vec3& center,
                      const std::string& label) {
  const int base = static_cast<int>(out.positions.size());
  const int faceBase = static_cast<int>(out.faces.size());
  std::vector<std::pair<double, double>> stations;
  for (std::size_t k = 0; k + 1 < profile.size(); ++k)
    for (int t = 0; t < stepsPerSpan; ++t) {
      const double u = static_cast<double>(t) / stepsPerSpan;
      stations.push_back({profile[k].first + u * (profile[k + 1].first - profile[k].first),
                          profile[k].second + u * (profile[k + 1].second - profile[k].second)});
    }
  stations.push_back(profile.back());

  for (const auto& [r, z] : stations)
    for (int s = 0; s < segments; ++s) {
      const double theta = 2.0 * M_PI * s / segments;
      out.positions.push_back(center + Vec3(r * std::cos(theta), r * std::sin(theta), z));
    }
  auto id = [&](int st, int s) { return base + st * segments + (s % segments); };
  for (int st = 0; st + 1 < static_cast<int>(stations.size()); ++st)
    for (int s = 0; s < segments; ++s) {
      out.faces.push_back({id(st, s), id(st, s + 1), id(st + 1, s + 1)});
      out.faces.push_back({id(st, s), id(st + 1, s + 1), id(st + 1, s)});
    }
  out.pieces.push_back({base, static_cast<int>(out.positions.size()), faceBase,
                        static_cast<int>(out.faces.size()), label});
}

// Tiny deterministic jitter keeps crossing configurations away from exact
// measure-zero alignments (vertices exactly on planes).
void jitter(MeshBuild& build, std::uint64_t seed, double amplitude,
            const std::vector<int>& keepExact) {
  std::mt19937_64 rng(seed * 6364136223846793005ULL + 1442695040888963407ULL);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<char> keep(build.positions.size(), 0);
  for (int v : keepExact) keep[v] = 1;
  for (std::size_t v = 0; v < build.positions.size(); ++v) {
    const Vec3 d(dist(rng), dist(rng), dist(rng));
    if (!keep[v]) build.positions[v] += d;
  }
}

MotionSequence staticBody(const MeshBuild& body, int frames, double fps) {
  MotionSequence seq;
  seq.vertexCount = static_cast<int>(body.positions.size());
  seq.faces = body.faces;
  seq.fps = fps;
  seq.frames.assign(frames, body.positions);
  return seq;
}

SolverConfig baseConfig() {
  SolverConfig config;
  config.material.stretchStiffness = 80.0;
  config.material.bendStiffness = 2e-6;
  config.material.density = 0.15;
  config.material.bodyCollisionStiffness = 4e4;
  config.material.bodyMargin = 0.002;
  config.material.frictionCoeff = 0.2;
  config.lambda1 = 1500.0;
  config.lambda2 = 3000.0;
  return config;
}

int cornerOf(int gridBase, int n, int i, int j) { return gridBase + i * (n + 1) + j; }

}  // namespace

SceneKind sceneKindFromName(const std::string& name) {
  if (name == "stackedSheets") return SceneKind::StackedSheets;
  if (name == "sphereBody") return SceneKind::SphereBody;
  if (name == "piercedSheet") return SceneKind::PiercedSheet;
  if (name == "nestedPierce") return SceneKind::NestedPierce;
  if (name == "poppedPocket") return SceneKind::PoppedPocket;
  fail(ErrorCode::InvalidRecipe, "unknown scene kind '" + name + "'");
}

std::string sceneKindName(SceneKind kind) {
  switch (kind) {
    case SceneKind::StackedSheets: return "stackedSheets";
    case SceneKind::SphereBody: return "sphereBody";
    case SceneKind::PiercedSheet: return "piercedSheet";
    case SceneKind::NestedPierce: return "nestedPierce";
    case SceneKind::PoppedPocket: return "poppedPocket";
  }
  return "stackedSheets";
}

Scene generateScene(const SceneRecipe& recipe) {
  if (recipe.resolution < 0 || recipe.scale < 0.0 || recipe.bodyFrames < 0)
    fail(ErrorCode::InvalidRecipe, "negative recipe parameter");
  if (recipe.resolution > 200)
    fail(ErrorCode::InvalidRecipe, "resolution above 200 is not supported at desk scale");

  Scene scene;
  MeshBuild garment;
  scene.config = baseConfig();

  switch (recipe.kind) {
    case SceneKind::StackedSheets: {
      const int n = recipe.resolution > 0 ? recipe.resolution : 16;
      const double size = recipe.scale > 0.0 ? recipe.scale : 0.2;
      const double gap = recipe.offset > 0.0 ? recipe.offset : 0.004;
      for (int layer = 0; layer < 2; ++layer) {
        const double z = gap * (layer + 1);
        appendGrid(garment, n, n,
                   [&](double u, double v) {
                     return Vec3((u - 0.5) * size, (v - 0.5) * size, z);
                   },
                   "sheet" + std::to_string(layer));
      }
      jitter(garment, recipe.seed, 1e-5, {});
      break;
    }

    case SceneKind::SphereBody: {
      // Two-layer drape: square sheets falling onto a static sphere body.
      const int n = recipe.resolution > 0 ? recipe.resolution : 14;
      const double size = recipe.scale > 0.0 ? recipe.scale : 0.2;
      const double gap = recipe.offset > 0.0 ? recipe.offset : 0.004;
      const double radius = 0.35 * size;
      for (int layer = 0; layer < 2; ++layer) {
        const double z = radius + 0.004 + gap * layer;
        appendGrid(garment, n, n,
                   [&](double u, double v) {
                     return Vec3((u - 0.5) * size, (v - 0.5) * size, z);
                   },
                   "sheet" + std::to_string(layer));
      }
      jitter(garment, recipe.seed, 1e-5, {});

      MeshBuild body;
      appendUvSphere(body, 20, 14, radius, Vec3(0, 0, 0), "body");
      const int frames = recipe.bodyFrames > 0 ? recipe.bodyFrames : 100;
      scene.body = staticBody(body, frames, 1.0 / scene.config.dt);
      scene.config.material.frictionCoeff = 0.4;
      break;
    }

    case SceneKind::PiercedSheet: {
      // Flat sheet pinned at its corners with a rest-shaped bump sheet below;
      // the bump apex pokes through the flat sheet, forming a closed contour.
      const int n = recipe.resolution > 0 ? recipe.resolution : 40;
      const double size = recipe.scale > 0.0 ? recipe.scale : 0.2;
      const double gap = 0.004;
      const double apex = recipe.offset > 0.0 ? recipe.offset : gap + 0.010;
      const double sigma = 0.16 * size;

      const int baseA = appendGrid(garment, n, n,
                                   [&](double u, double v) {
                                     return Vec3((u - 0.5) * size, (v - 0.5) * size, 0.0);
                                   },
                                   "sheet");
      const int baseB = appendGrid(
          garment, n, n,
          [&](double u, double v) {
            const double x = (u - 0.5) * size, y = (v - 0.5) * size;
            const double r2 = x * x + y * y;
            return Vec3(x, y, -gap + apex * std::exp(-r2 / (2.0 * sigma * sigma)));
          },
          "bump");
      scene.pinned = {cornerOf(baseA, n, 0, 0), cornerOf(baseA, n, 0, n), cornerOf(baseA, n, n, 0),
                      cornerOf(baseA, n, n, n), cornerOf(baseB, n, 0, 0), cornerOf(baseB, n, 0, n),
                      cornerOf(baseB, n, n, 0), cornerOf(baseB, n, n, n)};
      jitter(garment, recipe.seed, 1e-5, scene.pinned);

      if (recipe.bodyFrames > 0) {
        MeshBuild body;
        appendUvSphere(body, 10, 8, 0.05, Vec3(0, 0, -0.5), "body");
        scene.body = staticBody(body, recipe.bodyFrames, 1.0 / scene.config.dt);
      }
      scene.config.staticIterationCap = 800;
      scene.config.maxInnerIters = 48;
      break;
    }

    case SceneKind::NestedPierce: {
      // Sheet pierced twice by one trench-shaped piece: two concentric closed
      // contours, the inner one nested inside the outer.
      const int n = recipe.resolution > 0 ? recipe.resolution : 28;
      const double size = recipe.scale > 0.0 ? recipe.scale : 0.24;
      const double h = recipe.offset > 0.0 ? recipe.offset : 0.006;

      const int baseA = appendGrid(garment, n, n,
                                   [&](double u, double v) {
                                     return Vec3((u - 0.5) * size, (v - 0.5) * size, 0.0);
                                   },
                                   "sheet");
      // odd subdivision keeps revolution stations away from the sheet plane
      const double r1 = 0.10 * size, r2 = 0.17 * size, r3 = 0.24 * size, r4 = 0.42 * size;
      appendRevolution(garment,
                       {{r1, h}, {r2, -h}, {r3, h}, {r4, h}},
                       5, std::max(12, n), Vec3(0, 0, 0), "trench");
      scene.pinned = {cornerOf(baseA, n, 0, 0), cornerOf(baseA, n, 0, n), cornerOf(baseA, n, n, 0),
                      cornerOf(baseA, n, n, n)};
      jitter(garment, recipe.seed, 1e-5, scene.pinned);
      break;
    }

    case SceneKind::PoppedPocket: {
      // Pocket patch sewn over a host sheet (shared seam vertices make the
      // seam edges non-manifold) with a tent-shaped strip pinned inside the
      // pocket cavity and poking out through the pocket: the strip cannot
      // escape without passing through the sewn seam.
      const int n = recipe.resolution > 0 ? recipe.resolution : 12;
      const double size = recipe.scale > 0.0 ? recipe.scale : 0.12;
      const double h = recipe.offset > 0.0 ? recipe.offset : 0.01;

      const int baseH = appendGrid(garment, n, n,
                                   [&](double u, double v) {
                                     return Vec3((u - 0.5) * size, (v - 0.5) * size, 0.0);
                                   },
                                   "host");
      scene.pinned = {cornerOf(baseH, n, 0, 0), cornerOf(baseH, n, 0, n), cornerOf(baseH, n, n, 0),
                      cornerOf(baseH, n, n, n)};

      // Pocket over the central subgrid [lo, hi]^2, boundary sewn to the host.
      const int lo = n / 4, hi = n - n / 4;
      const double cell = size / n;
      const int faceBase = static_cast<int>(garment.faces.size());
      std::vector<std::vector<int>> pocketId(hi - lo + 1, std::vector<int>(hi - lo + 1, -1));
      const int pocketVertexBase = static_cast<int>(garment.positions.size());
      for (int i = lo; i <= hi; ++i)
        for (int j = lo; j <= hi; ++j) {
          const bool seam = (i == lo || i == hi || j == lo || j == hi);
          if (seam) {
            pocketId[i - lo][j - lo] = cornerOf(baseH, n, i, j);
          } else {
            const double x = (static_cast<double>(i) / n - 0.5) * size;
            const double y = (static_cast<double>(j) / n - 0.5) * size;
            const int db = std::min(std::min(i - lo, hi - i), std::min(j - lo, hi - j));
            const double lift = h * std::min(1.0, 0.7 * db);
            pocketId[i - lo][j - lo] = static_cast<int>(garment.positions.size());
            garment.positions.push_back(Vec3(x, y, lift));
          }
        }
      for (int i = lo; i < hi; ++i)
        for (int j = lo; j < hi; ++j) {
          const int a = pocketId[i - lo][j - lo], b = pocketId[i + 1 - lo][j - lo];
          const int c = pocketId[i + 1 - lo][j + 1 - lo], d = pocketId[i - lo][j + 1 - lo];
          garment.faces.push_back({a, b, c});
          garment.faces.push_back({a, c, d});
        }
      garment.pieces.push_back({pocketVertexBase, static_cast<int>(garment.positions.size()),
                                faceBase, static_cast<int>(garment.faces.size()), "pocket"});

      // Tent strip through the pocket: ends pinned inside the cavity.
      const double a = 0.20 * size;  // half-span, inside the pocket footprint
      const double zc = 0.35 * h;
      const double zApex = h + 0.02;
      const double width = 2.0 * cell;
      const int stripCols = 12;
      const int stripBase = appendGrid(
          garment, stripCols, 2,
          [&](double u, double v) {
            const double x = (u - 0.5) * 2.0 * a;
            const double t = 1.0 - std::abs(2.0 * u - 1.0);  // 0 at ends, 1 at apex
            const double z = zc + (zApex - zc) * t;
            return Vec3(x, (v - 0.5) * width, z);
          },
          "strip");
      for (int j = 0; j <= 2; ++j) {
        scene.pinned.push_back(cornerOf(stripBase, 2, 0, j));
        scene.pinned.push_back(cornerOf(stripBase, 2, stripCols, j));
      }
      jitter(garment, recipe.seed, 1e-5, scene.pinned);

      scene.config.staticIterationCap = 300;
      break;
    }
  }

  scene.positions = garment.positions;
  scene.faces = garment.faces;
  scene.pieces = garment.pieces;
  scene.config.pinnedVertices = scene.pinned;
  return scene;
}

}  // namespace ccloth
