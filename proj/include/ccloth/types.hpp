// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccloth {

using Vec3 = Eigen::Vector3d;
using Positions = std::vector<Vec3>;
using Face = std::array<int, 3>;
using Edge = std::array<int, 2>;  // undirected, stored with v0 < v1

// All quantities are SI: meters, kilograms, seconds.
inline constexpr double kAreaTolerance = 1e-12;      // m^2, below this a face has no usable normal
inline constexpr double kCrossingTolerance = 1e-9;   // m, contour chaining / barycentric checks
inline constexpr double kParallelTolerance = 1e-10;  // relative cutoff for edge-plane denominators

enum class ErrorCode {
  DegenerateFace,
  IndexOutOfRange,
  ZeroAreaFace,
  EmptyMesh,
  ParseError,
  NonTriangulableFace,
  TruncatedFile,
  CountMismatch,
  IoError,
  InvalidRecipe,
  NonFiniteState,
  UnknownConfigKey,
  BadPieceLayout,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline Edge makeEdge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace ccloth
