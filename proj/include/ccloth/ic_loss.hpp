// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/collision.hpp"

namespace ccloth {

// Which part of the contour-loss gradient drives descent. The translational
// component of each crossing is parallel to the host face normal and moves
// cloth through the intersecting surface; the distortional component lies in
// the host plane and shrinks the contour by squeezing triangles. Descent uses
// the translational part by default; DistortionalOnly exists for ablations.
enum class IcGradientMode { TranslationalOnly, Full, DistortionalOnly };

// Sum of squared crossing-segment lengths (m^2). Points are re-derived from
// the given positions against each crossing's frozen host plane, so the value
// stays consistent with icGradient while the intersection set is held fixed;
// at the detection positions it equals the stored crossing points.
double icLossValue(const std::vector<TriPairIntersection>& intersections,
                   std::span<const Vec3> positions);

// Per-crossing contribution flows only to the two vertices of the crossing
// edge, with the host-plane quantities frozen. Returns the number of crossings
// skipped because the edge runs near-parallel to its frozen host plane; a
// skipped crossing drops its whole pair from value and gradient alike.
int icGradient(const std::vector<TriPairIntersection>& intersections,
               std::span<const Vec3> positions, IcGradientMode mode, std::span<Vec3> grad);

// -lambda2 * icGradient, shared by the dynamic solver and the static untangler.
int icDescentDirection(const std::vector<TriPairIntersection>& intersections,
                       std::span<const Vec3> positions, double lambda2, IcGradientMode mode,
                       std::span<Vec3> out);

}  // namespace ccloth
