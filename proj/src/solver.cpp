// SPDX-License-Identifier: Apache-2.0
#include "ccloth/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ccloth {

namespace {

void checkFinite(std::span<const Vec3> positions, int frame, const char* what) {
  for (std::size_t v = 0; v < positions.size(); ++v)
    if (!positions[v].allFinite())
      fail(ErrorCode::NonFiniteState, std::string(what) + " non-finite at vertex " +
                                          std::to_string(v) + ", frame " + std::to_string(frame));
}

double effectiveLambda2(const SolverConfig& config) {
  if (config.ablation == Ablation::OnlyRepulsive || config.ablation == Ablation::NoIcLoss)
    return 0.0;
  return config.lambda2;
}

IcGradientMode effectiveIcMode(const SolverConfig& config) {
  if (config.ablation == Ablation::FullGradient) return IcGradientMode::Full;
  return config.icMode;
}

struct Terms {
  double stretch = 0, bend = 0, gravity = 0, inertia = 0, bodyCollision = 0, friction = 0,
         repulsion = 0, icLoss = 0;

  std::map<std::string, double> toMap() const {
    return {{"stretch", stretch},   {"bend", bend},
            {"gravity", gravity},   {"inertia", inertia},
            {"bodyCollision", bodyCollision}, {"friction", friction},
            {"repulsion", repulsion}, {"icLoss", icLoss}};
  }
};

// Frozen-structure objective for one graph-refresh window: the correspondence
// and intersection sets are fixed at build time, projection geometry is
// re-frozen once per inner iteration, and every evaluation within a line
// search sees one fixed smooth function.
class ObjectiveContext {
 public:
  void build(const TriMesh& garment, const RestState& rest, std::span<const Vec3> positions,
             std::span<const Vec3> dPrevPositions, const TriMesh* bodyMesh,
             std::span<const Vec3> bodyPositions, std::span<const Vec3> bodyPrevPositions,
             const SolverConfig& config, bool dynamic) {
    garment_ = &garment;
    rest_ = &rest;
    config_ = &config;
    dynamic_ = dynamic;
    lambda2_ = effectiveLambda2(config);
    mode_ = effectiveIcMode(config);

    WorldGraphConfig graphConfig;
    graphConfig.epsCloth = config.epsCloth;
    graphConfig.epsBody = config.epsBody;
    graphConfig.classifyInteractions = config.ablation != Ablation::OnlyRepulsive;
    graph_ = buildInputGraph(garment, positions, dPrevPositions, bodyMesh, bodyPositions,
                             graphConfig);

    bodyContacts_.clear();
    if (bodyMesh && bodyMesh->faceCount() > 0) {
      const BvhTree bodyBvh = BvhTree::build(*bodyMesh, bodyPositions, 0.0);
      bodyContacts_ = findBodyContacts(positions, *bodyMesh, bodyPositions, bodyPrevPositions,
                                       bodyBvh, 2.0 * config.material.bodyMargin);
    }
    frictionContacts_.clear();
    if (dynamic_)
      frictionContacts_ = gatherFrictionContacts(graph_.repulsiveWorld, garment, config.xi,
                                                 bodyContacts_, config.material);
  }

  // Re-freezes correspondence projection geometry against the positions at the
  // start of an inner iteration.
  void refreshGeometry(std::span<const Vec3> positions) {
    refreshCorrespondenceGeometry(graph_.repulsiveWorld, *garment_, positions);
  }

  double eval(std::span<const Vec3> positions, std::span<const Vec3> framePrev,
              std::span<const Vec3> frameVel, std::span<Vec3> grad, Terms* terms) const {
    for (Vec3& g : grad) g.setZero();
    Terms t;
    const MaterialParams& mat = config_->material;

    t.stretch = stretchingEnergy(*garment_, *rest_, positions, mat, grad);
    t.bend = bendingEnergy(*garment_, *rest_, positions, mat, grad);
    if (dynamic_) {
      t.inertia = inertiaEnergy(*garment_, positions, framePrev, frameVel, config_->dt, grad);
      t.gravity = gravityEnergy(*garment_, positions, mat, grad);
      t.friction = frictionEnergy(positions, framePrev, frictionContacts_, mat, grad);
    } else if (config_->staticGravity) {
      t.gravity = gravityEnergy(*garment_, positions, mat, grad);
    }
    if (!bodyContacts_.empty())
      t.bodyCollision = bodyCollisionPenalty(positions, bodyContacts_, mat, grad);

    if (config_->lambda1 != 0.0 && !graph_.repulsiveWorld.empty()) {
      scratch_.assign(positions.size(), Vec3::Zero());
      t.repulsion = repulsionEnergy(graph_.repulsiveWorld, *garment_, positions, config_->xi,
                                    scratch_);
      for (std::size_t v = 0; v < grad.size(); ++v) grad[v] += config_->lambda1 * scratch_[v];
    }
    if (lambda2_ != 0.0 && !graph_.intersections.empty()) {
      t.icLoss = icLossValue(graph_.intersections, positions);
      scratch_.assign(positions.size(), Vec3::Zero());
      icGradient(graph_.intersections, positions, mode_, scratch_);
      for (std::size_t v = 0; v < grad.size(); ++v) grad[v] += lambda2_ * scratch_[v];
    }

    if (terms) *terms = t;
    return t.stretch + t.bend + t.gravity + t.inertia + t.bodyCollision + t.friction +
           config_->lambda1 * t.repulsion + lambda2_ * t.icLoss;
  }

  const WorldGraph& graph() const { return graph_; }
  int intersectionCount() const { return static_cast<int>(graph_.intersections.size()); }

 private:
  const TriMesh* garment_ = nullptr;
  const RestState* rest_ = nullptr;
  const SolverConfig* config_ = nullptr;
  bool dynamic_ = true;
  double lambda2_ = 0.0;
  IcGradientMode mode_ = IcGradientMode::TranslationalOnly;
  WorldGraph graph_;
  std::vector<BodyContact> bodyContacts_;
  std::vector<FrictionContact> frictionContacts_;
  mutable Positions scratch_;
};

std::vector<char> pinnedMask(const SolverConfig& config, int vertexCount) {
  std::vector<char> mask(vertexCount, 0);
  for (int v : config.pinnedVertices) {
    if (v < 0 || v >= vertexCount)
      fail(ErrorCode::IndexOutOfRange, "pinned vertex " + std::to_string(v) + " out of range");
    mask[v] = 1;
  }
  return mask;
}

// Diagonal preconditioner from the inertia and stretch stiffness diagonal;
// keeps the descent direction well-scaled without second derivatives.
std::vector<double> buildPreconditioner(const TriMesh& mesh, const SolverConfig& config,
                                        bool dynamic) {
  std::vector<double> diag(mesh.vertexCount(), 0.0);
  for (const Edge& e : mesh.edges) {
    diag[e[0]] += config.material.stretchStiffness;
    diag[e[1]] += config.material.stretchStiffness;
  }
  const double invDt2 = 1.0 / (config.dt * config.dt);
  std::vector<double> pre(mesh.vertexCount());
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    double h = diag[v];
    if (dynamic) h += mesh.vertexMass[v] * invDt2;
    pre[v] = h > 0.0 ? 1.0 / h : 1.0;
  }
  return pre;
}

struct DescentOutcome {
  bool converged = false;
  bool stalled = false;
  double accepted = 0.0;  // objective at the accepted point
  double start = 0.0;     // objective at the iteration start
};

// One preconditioned gradient step with Armijo backtracking. Returns with
// `stalled` when no step length satisfies the sufficient-decrease condition.
DescentOutcome descentStep(const ObjectiveContext& ctx, Positions& y,
                           std::span<const Vec3> framePrev, std::span<const Vec3> frameVel,
                           const std::vector<char>& pinned, const std::vector<double>& pre,
                           const SolverConfig& config, Positions& grad, Positions& trial,
                           Terms* terms) {
  DescentOutcome outcome;
  const int nv = static_cast<int>(y.size());

  const double e0 = ctx.eval(y, framePrev, frameVel, grad, terms);
  if (!std::isfinite(e0)) fail(ErrorCode::NonFiniteState, "objective became non-finite");
  outcome.start = e0;
  outcome.accepted = e0;

  double gmax = 0.0;
  for (int v = 0; v < nv; ++v) {
    if (pinned[v]) grad[v].setZero();
    gmax = std::max(gmax, grad[v].norm());
  }
  if (gmax < config.gradTolerance) {
    outcome.converged = true;
    return outcome;
  }

  double gtd = 0.0;
  for (int v = 0; v < nv; ++v) gtd -= pre[v] * grad[v].squaredNorm();

  double alpha = 1.0;
  for (int h = 0; h <= config.backtracking.maxHalvings; ++h) {
    for (int v = 0; v < nv; ++v) trial[v] = y[v] - alpha * pre[v] * grad[v];
    const double et = ctx.eval(trial, framePrev, frameVel, grad, nullptr);
    if (std::isfinite(et) && et <= e0 + config.backtracking.armijoConstant * alpha * gtd) {
      y.swap(trial);
      outcome.accepted = et;
      return outcome;
    }
    alpha *= config.backtracking.shrink;
  }
  outcome.stalled = true;
  return outcome;
}

}  // namespace

SimState makeSimState(Positions initialPositions) {
  SimState state;
  state.prevPositions = initialPositions;
  state.velocities.assign(initialPositions.size(), Vec3::Zero());
  state.positions = std::move(initialPositions);
  return state;
}

void stepFrame(SimState& state, const TriMesh& garment, const RestState& rest,
               const TriMesh* bodyMesh, std::span<const Vec3> bodyPositions,
               std::span<const Vec3> bodyPrevPositions, const SolverConfig& config) {
  const auto wallStart = std::chrono::steady_clock::now();
  const int nv = garment.vertexCount();
  checkFinite(state.positions, state.frameIndex, "positions");
  checkFinite(state.velocities, state.frameIndex, "velocities");

  const Positions x0 = state.positions;
  const Positions v0 = state.velocities;
  const std::vector<char> pinned = pinnedMask(config, nv);
  const std::vector<double> pre = buildPreconditioner(garment, config, true);

  // Inertial predictor as warm start; its minimizer is the ballistic update.
  Positions y = x0;
  for (int v = 0; v < nv; ++v)
    if (!pinned[v]) y[v] += config.dt * v0[v];

  ObjectiveContext ctx;
  Positions grad(nv, Vec3::Zero()), trial(nv, Vec3::Zero());
  Terms terms;

  int itersUsed = 0;
  bool stalledOnce = false;
  bool stalledEver = false;
  int sinceRefresh = 0;
  bool needBuild = true;

  for (int it = 0; it < config.maxInnerIters; ++it) {
    if (needBuild || sinceRefresh >= config.graphRefreshEvery) {
      ctx.build(garment, rest, y, x0, bodyMesh, bodyPositions, bodyPrevPositions, config, true);
      sinceRefresh = 0;
      needBuild = false;
    } else {
      ctx.refreshGeometry(y);
    }

    const DescentOutcome outcome =
        descentStep(ctx, y, x0, v0, pinned, pre, config, grad, trial, &terms);
    itersUsed = it + 1;
    if (outcome.converged) break;
    if (outcome.stalled) {
      stalledEver = true;
      if (stalledOnce) break;  // accept best-so-far
      stalledOnce = true;
      needBuild = true;  // a fresh graph may unstick the line search
      continue;
    }
    stalledOnce = false;
    ++sinceRefresh;
  }

  checkFinite(y, state.frameIndex, "solution");
  state.prevPositions = x0;
  state.positions = y;
  state.velocities.resize(nv);
  for (int v = 0; v < nv; ++v)
    state.velocities[v] = pinned[v] ? Vec3::Zero() : Vec3((y[v] - x0[v]) / config.dt);
  state.frameIndex += 1;

  // Stats from a fresh evaluation at the final positions.
  ctx.build(garment, rest, y, x0, bodyMesh, bodyPositions, bodyPrevPositions, config, true);
  ctx.eval(y, x0, v0, grad, &terms);
  state.stats = FrameStats{};
  state.stats.frame = state.frameIndex - 1;
  state.stats.intersectingPairs = ctx.intersectionCount();
  state.stats.icLoss = icLossValue(ctx.graph().intersections, y);
  state.stats.perTermEnergy = terms.toMap();
  state.stats.innerIters = itersUsed;
  state.stats.lineSearchStalled = stalledEver;
  state.stats.wallTimeMs =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wallStart)
          .count();
}

ResolveResult resolveStatic(SimState& state, const TriMesh& garment, const RestState& rest,
                            const TriMesh* bodyMesh, std::span<const Vec3> bodyPositions,
                            const SolverConfig& config) {
  const int nv = garment.vertexCount();
  checkFinite(state.positions, state.frameIndex, "positions");
  const std::vector<char> pinned = pinnedMask(config, nv);
  const std::vector<double> pre = buildPreconditioner(garment, config, false);
  const Positions zeroVel(nv, Vec3::Zero());

  Positions& y = state.positions;
  ObjectiveContext ctx;
  Positions grad(nv, Vec3::Zero()), trial(nv, Vec3::Zero());

  ResolveResult result;
  int consecutiveStalls = 0;
  // The world graph is rebuilt every iteration here: the per-iteration
  // intersection count doubles as the trajectory metric.
  for (int iter = 0; iter <= config.staticIterationCap; ++iter) {
    ctx.build(garment, rest, y, y, bodyMesh, bodyPositions, bodyPositions, config, false);
    result.trajectory.push_back(ctx.intersectionCount());
    if (ctx.intersectionCount() == 0) {
      result.status = ResolveStatus::Resolved;
      break;
    }
    if (iter == config.staticIterationCap) break;

    const DescentOutcome outcome =
        descentStep(ctx, y, y, zeroVel, pinned, pre, config, grad, trial, nullptr);
    result.iterations = iter + 1;
    if (outcome.stalled) {
      // No move happened, so the count pushed at iteration start still holds.
      if (++consecutiveStalls >= 2) break;
    } else {
      consecutiveStalls = 0;
    }
    // Gradient vanished with intersections left: a genuine local minimum.
    if (outcome.converged && ctx.intersectionCount() > 0) break;
  }
  state.prevPositions = y;
  state.velocities.assign(nv, Vec3::Zero());
  return result;
}

std::vector<FrameStats> simulateSequence(
    const TriMesh& garment, const Positions& initialPositions, const TriMesh* bodyMesh,
    std::span<const Positions> bodyFrames, const SolverConfig& config,
    const std::function<void(const FrameStats&)>& onFrame,
    const std::function<void(int, const Positions&)>& onPositions) {
  std::vector<FrameStats> stats;
  SimState state = makeSimState(initialPositions);
  const RestState rest = makeRestState(garment);

  for (std::size_t f = 0; f < bodyFrames.size(); ++f) {
    const Positions& bodyNow = bodyFrames[f];
    const Positions& bodyPrev = bodyFrames[f > 0 ? f - 1 : 0];
    try {
      stepFrame(state, garment, rest, bodyMesh, bodyNow, bodyPrev, config);
    } catch (Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (frame " + std::to_string(f) + ")");
    }
    stats.push_back(state.stats);
    if (onFrame) onFrame(state.stats);
    if (onPositions) onPositions(static_cast<int>(f), state.positions);
  }
  return stats;
}

}  // namespace ccloth
