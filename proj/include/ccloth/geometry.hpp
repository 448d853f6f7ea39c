// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ccloth/types.hpp"

namespace ccloth {

// Barycentric coordinates of p with respect to triangle (a, b, c), computed
// in the triangle's plane (p is projected along the normal first).
Vec3 barycentric(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// True when all barycentric coordinates exceed -tol.
bool pointInTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, double tol);

Vec3 closestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace ccloth
