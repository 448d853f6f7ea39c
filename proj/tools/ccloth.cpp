// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: scene generation, intersection/contour analysis,
// static untangling, and full simulation runs.
//
// Exit codes: 0 clean, 1 internal error, 2 input error, 3 unresolved or
// intersecting (scriptable for ablation harnesses).

#include "ccloth/scene.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace ccloth;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnresolved = 3;

bool isInputError(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::TruncatedFile:
    case ErrorCode::CountMismatch:
    case ErrorCode::NonTriangulableFace:
    case ErrorCode::InvalidRecipe:
    case ErrorCode::UnknownConfigKey:
    case ErrorCode::DegenerateFace:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::EmptyMesh:
      return true;
    default:
      return false;
  }
}

struct AnalysisRow {
  int frame = 0;
  int intersectingPairs = 0;
  int openContours = 0;
  int closedContours = 0;
  int repelledNodes = 0;
  int nonRepelledNodes = 0;
  double icLoss = 0.0;
};

AnalysisRow analyzeFrame(const TriMesh& mesh, const Positions& positions, int frame,
                         const std::string& contourPath) {
  WorldGraphConfig config;
  const WorldGraph graph = buildInputGraph(mesh, positions, positions, nullptr, {}, config);

  AnalysisRow row;
  row.frame = frame;
  row.intersectingPairs = static_cast<int>(graph.intersections.size());
  row.openContours = graph.openContours();
  row.closedContours = graph.closedContours();
  for (NodeClass c : graph.nodeClass.perNode)
    (c == NodeClass::Repelled ? row.repelledNodes : row.nonRepelledNodes) += 1;
  row.icLoss = icLossValue(graph.intersections, positions);

  if (!contourPath.empty()) {
    std::ofstream out(contourPath);
    if (!out) fail(ErrorCode::IoError, "cannot write " + contourPath);
    writeContourObj(out, graph.contours, graph.intersections);
  }
  return row;
}

void writeAnalysisCsv(std::ostream& out, const std::vector<AnalysisRow>& rows) {
  out << "frame,intersectingPairs,openContours,closedContours,repelledNodes,nonRepelledNodes,"
         "icLoss\n";
  char buf[64];
  for (const AnalysisRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.icLoss);
    out << r.frame << "," << r.intersectingPairs << "," << r.openContours << ","
        << r.closedContours << "," << r.repelledNodes << "," << r.nonRepelledNodes << "," << buf
        << "\n";
  }
}

int cmdGenScene(const std::string& kindName, std::uint64_t seed, const std::string& outDir,
                int resolution, double scale, double offset, int bodyFrames) {
  SceneRecipe recipe;
  recipe.kind = sceneKindFromName(kindName);
  recipe.seed = seed;
  recipe.resolution = resolution;
  recipe.scale = scale;
  recipe.offset = offset;
  recipe.bodyFrames = bodyFrames;

  const Scene scene = generateScene(recipe);
  fs::create_directories(outDir);
  writeObj(outDir + "/garment.obj", scene.positions, scene.faces);
  if (!scene.body.empty()) writeMotionSequence(outDir + "/body.mseq", scene.body);
  saveConfig(outDir + "/config.json", scene.config);
  std::cout << "wrote " << sceneKindName(recipe.kind) << " scene to " << outDir << " ("
            << scene.positions.size() << " vertices, " << scene.faces.size() << " faces"
            << (scene.body.empty() ? "" : ", body") << ")\n";
  return kExitClean;
}

int cmdAnalyze(const std::string& inPath, const std::string& csvPath,
               const std::string& contourPrefix) {
  std::vector<AnalysisRow> rows;
  if (inPath.size() > 5 && inPath.substr(inPath.size() - 5) == ".mseq") {
    const MotionSequence seq = readMotionSequence(inPath);
    if (seq.frames.empty()) fail(ErrorCode::ParseError, inPath + ": sequence has no frames");
    const TriMesh mesh = buildTopology(seq.frames.front(), seq.faces, 0.15);
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
      std::string contourPath;
      if (!contourPrefix.empty())
        contourPath = contourPrefix + "_f" + std::to_string(f) + ".obj";
      rows.push_back(analyzeFrame(mesh, seq.frames[f], static_cast<int>(f), contourPath));
    }
  } else {
    const ObjData obj = readObj(inPath);
    const TriMesh mesh = buildTopology(obj.positions, obj.faces, 0.15);
    rows.push_back(analyzeFrame(mesh, obj.positions, 0,
                                contourPrefix.empty() ? "" : contourPrefix + ".obj"));
  }

  if (csvPath.empty()) {
    writeAnalysisCsv(std::cout, rows);
  } else {
    std::ofstream out(csvPath);
    if (!out) fail(ErrorCode::IoError, "cannot write " + csvPath);
    writeAnalysisCsv(out, rows);
  }
  return rows.back().intersectingPairs == 0 ? kExitClean : kExitUnresolved;
}

int cmdResolve(const std::string& inPath, const std::string& configPath,
               const std::string& outPath, std::string csvPath) {
  const ObjData obj = readObj(inPath);
  const SolverConfig config = loadConfig(configPath);
  const TriMesh mesh = buildTopology(obj.positions, obj.faces, config.material.density);
  const RestState rest = makeRestState(mesh);

  SimState state = makeSimState(obj.positions);
  const ResolveResult result = resolveStatic(state, mesh, rest, nullptr, {}, config);

  writeObj(outPath, state.positions, mesh.faces);
  if (csvPath.empty()) csvPath = outPath + ".trajectory.csv";
  {
    std::ofstream out(csvPath);
    if (!out) fail(ErrorCode::IoError, "cannot write " + csvPath);
    out << "iteration,intersectingPairs\n";
    for (std::size_t i = 0; i < result.trajectory.size(); ++i)
      out << i << "," << result.trajectory[i] << "\n";
  }
  std::cout << (result.status == ResolveStatus::Resolved ? "resolved" : "unresolved") << " after "
            << result.iterations << " iterations, " << result.trajectory.back()
            << " intersecting pairs left\n";
  return result.status == ResolveStatus::Resolved ? kExitClean : kExitUnresolved;
}

int cmdSimulate(const std::string& garmentPath, const std::string& bodyPath,
                const std::string& configPath, const std::string& outDir,
                const std::string& ablation, int dumpEvery, bool keepTiming) {
  const ObjData obj = readObj(garmentPath);
  const MotionSequence body = readMotionSequence(bodyPath);
  SolverConfig config = loadConfig(configPath);
  if (!ablation.empty()) config.ablation = ablationFromName(ablation);

  const TriMesh garment = buildTopology(obj.positions, obj.faces, config.material.density);
  const TriMesh bodyMesh = buildTopology(body.frames.front(), body.faces, 1.0);
  if (std::abs(1.0 / body.fps - config.dt) > 1e-9)
    std::cerr << "warning: body sequence fps " << body.fps << " does not match dt " << config.dt
              << "; frames are stepped at dt\n";

  fs::create_directories(outDir);
  std::vector<FrameStats> stats = simulateSequence(
      garment, obj.positions, &bodyMesh, body.frames, config, {},
      [&](int frame, const Positions& positions) {
        if (dumpEvery > 0 && frame % dumpEvery == 0) {
          char name[64];
          std::snprintf(name, sizeof(name), "/frame_%06d.obj", frame);
          writeObj(outDir + name, positions, garment.faces);
        }
      });

  // Wall times vary run to run; zero them unless explicitly requested so that
  // identical inputs produce bit-identical stats files.
  if (!keepTiming)
    for (FrameStats& s : stats) s.wallTimeMs = 0.0;
  writeStatsCsv(stats, outDir + "/stats.csv");

  long total = 0;
  for (const FrameStats& s : stats) total += s.intersectingPairs;
  std::cout << "simulated " << stats.size() << " frames (" << ablationName(config.ablation)
            << "), mean intersecting pairs "
            << (stats.empty() ? 0.0 : static_cast<double>(total) / stats.size()) << "\n";
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cloth intersection analysis, untangling, and simulation"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("genscene", "generate a synthetic scene");
  std::string genKind = "stackedSheets", genOut = "scene";
  std::uint64_t genSeed = 0;
  int genResolution = 0, genBodyFrames = 0;
  double genScale = 0.0, genOffset = 0.0;
  gen->add_option("--kind", genKind, "scene kind")->required();
  gen->add_option("--seed", genSeed, "jitter seed");
  gen->add_option("--out", genOut, "output directory")->required();
  gen->add_option("--resolution", genResolution, "grid resolution (0 = default)");
  gen->add_option("--scale", genScale, "scene scale in meters (0 = default)");
  gen->add_option("--offset", genOffset, "kind-specific offset (0 = default)");
  gen->add_option("--body-frames", genBodyFrames, "body sequence frames (0 = default)");

  auto* analyze = app.add_subcommand("analyze", "report intersections and contours");
  std::string anIn, anCsv, anContours;
  analyze->add_option("--in", anIn, "input .obj or .mseq")->required();
  analyze->add_option("--csv", anCsv, "stats CSV path (stdout when omitted)");
  analyze->add_option("--contours", anContours, "contour polyline OBJ path prefix");

  auto* resolve = app.add_subcommand("resolve", "untangle a static mesh");
  std::string resIn, resConfig, resOut, resCsv;
  resolve->add_option("--in", resIn, "input .obj")->required();
  resolve->add_option("--config", resConfig, "config.json")->required();
  resolve->add_option("--out", resOut, "output .obj")->required();
  resolve->add_option("--csv", resCsv, "trajectory CSV path");

  auto* simulate = app.add_subcommand("simulate", "run a body-driven simulation");
  std::string simGarment, simBody, simConfig, simOut, simAblation;
  int simDumpEvery = 0;
  bool simTiming = false;
  simulate->add_option("--garment", simGarment, "garment .obj")->required();
  simulate->add_option("--body", simBody, "body .mseq")->required();
  simulate->add_option("--config", simConfig, "config.json")->required();
  simulate->add_option("--out", simOut, "output directory")->required();
  simulate->add_option("--ablation", simAblation,
                       "ours | only-repulsive | no-ic-loss | full-gradient");
  simulate->add_option("--dump-every", simDumpEvery, "write mesh every N frames");
  simulate->add_flag("--timing", simTiming, "keep wall-clock times in stats.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitClean : kExitInput;
  }

  try {
    if (gen->parsed())
      return cmdGenScene(genKind, genSeed, genOut, genResolution, genScale, genOffset,
                         genBodyFrames);
    if (analyze->parsed()) return cmdAnalyze(anIn, anCsv, anContours);
    if (resolve->parsed()) return cmdResolve(resIn, resConfig, resOut, resCsv);
    if (simulate->parsed())
      return cmdSimulate(simGarment, simBody, simConfig, simOut, simAblation, simDumpEvery,
                         simTiming);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return isInputError(e.code()) ? kExitInput : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
