// SPDX-License-Identifier: Apache-2.0
#include "ccloth/ic_loss.hpp"

#include <cmath>

namespace ccloth {

namespace {

struct CrossingEval {
  double s = 0.0;
  double denom = 0.0;  // (x1 - x0) . n
  Vec3 point = Vec3::Zero();
  bool valid = false;
};

CrossingEval evalCrossing(const EdgeFaceCrossing& crossing, std::span<const Vec3> positions) {
  CrossingEval eval;
  const Vec3& x0 = positions[crossing.edge[0]];
  const Vec3& x1 = positions[crossing.edge[1]];
  const Vec3 d = x1 - x0;
  eval.denom = d.dot(crossing.hostNormal);
  if (std::abs(eval.denom) < kParallelTolerance * d.norm()) return eval;
  eval.s = (crossing.hostOffset - x0.dot(crossing.hostNormal)) / eval.denom;
  eval.point = x0 + eval.s * d;
  eval.valid = true;
  return eval;
}

}  // namespace

double icLossValue(const std::vector<TriPairIntersection>& intersections,
                   std::span<const Vec3> positions) {
  double total = 0.0;
  for (const TriPairIntersection& pair : intersections) {
    const CrossingEval e0 = evalCrossing(pair.crossings[0], positions);
    const CrossingEval e1 = evalCrossing(pair.crossings[1], positions);
    if (!e0.valid || !e1.valid) continue;
    total += (e0.point - e1.point).squaredNorm();
  }
  return total;
}

int icGradient(const std::vector<TriPairIntersection>& intersections,
               std::span<const Vec3> positions, IcGradientMode mode, std::span<Vec3> grad) {
  int skipped = 0;
  for (const TriPairIntersection& pair : intersections) {
    const CrossingEval e0 = evalCrossing(pair.crossings[0], positions);
    const CrossingEval e1 = evalCrossing(pair.crossings[1], positions);
    if (!e0.valid || !e1.valid) {
      skipped += (!e0.valid ? 1 : 0) + (!e1.valid ? 1 : 0);
      continue;
    }

    const Vec3 segment = e0.point - e1.point;  // p_I0 - p_I1
    for (int j = 0; j < 2; ++j) {
      const EdgeFaceCrossing& crossing = pair.crossings[j];
      const CrossingEval& eval = (j == 0) ? e0 : e1;
      const Vec3 dLdp = (j == 0) ? 2.0 * segment : -2.0 * segment;

      const int a = crossing.edge[0], b = crossing.edge[1];
      const Vec3 edgeVec = positions[b] - positions[a];

      if (mode != IcGradientMode::TranslationalOnly) {
        // dp/dx0 = (1 - s) I, dp/dx1 = s I with s held fixed
        grad[a] += (1.0 - eval.s) * dLdp;
        grad[b] += eval.s * dLdp;
      }
      if (mode != IcGradientMode::DistortionalOnly) {
        // dp/ds = x1 - x0; ds/dx0 = ((s - 1)/denom) n, ds/dx1 = (-s/denom) n
        const double coeff = dLdp.dot(edgeVec) / eval.denom;
        grad[a] += coeff * (eval.s - 1.0) * crossing.hostNormal;
        grad[b] += coeff * (-eval.s) * crossing.hostNormal;
      }
    }
  }
  return skipped;
}

int icDescentDirection(const std::vector<TriPairIntersection>& intersections,
                       std::span<const Vec3> positions, double lambda2, IcGradientMode mode,
                       std::span<Vec3> out) {
  Positions scratch(out.size(), Vec3::Zero());
  const int skipped = icGradient(intersections, positions, mode, scratch);
  for (std::size_t v = 0; v < out.size(); ++v) out[v] -= lambda2 * scratch[v];
  return skipped;
}

}  // namespace ccloth
