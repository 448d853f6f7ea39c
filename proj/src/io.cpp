// SPDX-License-Identifier: Apache-2.0
#include "ccloth/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ccloth {

namespace {

using nlohmann::json;

std::string formatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parseFail(const std::string& path, int line, const std::string& what) {
  fail(ErrorCode::ParseError, path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ObjData readObj(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);

  ObjData data;
  bool warnedNormals = false;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p[0] >> p[1] >> p[2])) parseFail(path, lineNo, "malformed vertex");
      data.positions.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ss >> token) {
        // "i", "i/t", "i/t/n", "i//n" all start with the vertex index
        const long v = std::strtol(token.c_str(), nullptr, 10);
        if (v == 0) parseFail(path, lineNo, "malformed face index '" + token + "'");
        if (v < 0) parseFail(path, lineNo, "negative face indices are not supported");
        if (v > static_cast<long>(data.positions.size()))
          parseFail(path, lineNo, "face references vertex " + std::to_string(v) +
                                      " before its definition");
        idx.push_back(static_cast<int>(v - 1));
      }
      if (idx.size() < 3) parseFail(path, lineNo, "face with fewer than 3 vertices");
      if (idx.size() > 4)
        fail(ErrorCode::NonTriangulableFace,
             path + ":" + std::to_string(lineNo) + ": faces with more than 4 vertices");
      data.faces.push_back({idx[0], idx[1], idx[2]});
      if (idx.size() == 4) data.faces.push_back({idx[0], idx[2], idx[3]});
    } else if (tag == "vn" || tag == "vt") {
      if (!warnedNormals) {
        std::fprintf(stderr, "warning: %s: ignoring %s records\n", path.c_str(), tag.c_str());
        warnedNormals = true;
      }
    }
    // o/g/s/mtllib/usemtl/# are skipped
  }
  return data;
}

void writeObj(const std::string& path, std::span<const Vec3> positions,
              std::span<const Face> faces) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  char buf[160];
  for (const Vec3& p : positions) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", p[0], p[1], p[2]);
    out << buf;
  }
  for (const Face& f : faces) out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

namespace {

constexpr char kMseqMagic[5] = {'M', 'S', 'E', 'Q', '1'};

template <class T>
void writeRaw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T readRaw(std::ifstream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) fail(ErrorCode::TruncatedFile, path + ": truncated");
  return value;
}

}  // namespace

MotionSequence readMotionSequence(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);

  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, kMseqMagic, 5) != 0)
    fail(ErrorCode::ParseError, path + ": bad magic, not an MSEQ1 file");

  MotionSequence seq;
  const auto vertexCount = readRaw<std::uint64_t>(in, path);
  const auto faceCount = readRaw<std::uint64_t>(in, path);
  seq.fps = readRaw<double>(in, path);
  const auto frameCount = readRaw<std::uint64_t>(in, path);
  if (seq.fps <= 0.0) fail(ErrorCode::ParseError, path + ": fps must be positive");

  seq.vertexCount = static_cast<int>(vertexCount);
  seq.faces.resize(faceCount);
  for (auto& f : seq.faces) {
    for (int k = 0; k < 3; ++k) {
      const auto v = readRaw<std::uint32_t>(in, path);
      if (v >= vertexCount)
        fail(ErrorCode::CountMismatch, path + ": face index exceeds vertex count");
      f[k] = static_cast<int>(v);
    }
  }
  seq.frames.resize(frameCount);
  for (auto& frame : seq.frames) {
    frame.resize(vertexCount);
    for (auto& p : frame)
      for (int k = 0; k < 3; ++k) p[k] = readRaw<double>(in, path);
  }
  return seq;
}

void writeMotionSequence(const std::string& path, const MotionSequence& seq) {
  for (const Positions& frame : seq.frames)
    if (static_cast<int>(frame.size()) != seq.vertexCount)
      fail(ErrorCode::CountMismatch, "frame vertex count differs from header");
  for (const Face& f : seq.faces)
    for (int k = 0; k < 3; ++k)
      if (f[k] < 0 || f[k] >= seq.vertexCount)
        fail(ErrorCode::CountMismatch, "face index exceeds vertex count");

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out.write(kMseqMagic, 5);
  writeRaw(out, static_cast<std::uint64_t>(seq.vertexCount));
  writeRaw(out, static_cast<std::uint64_t>(seq.faces.size()));
  writeRaw(out, seq.fps);
  writeRaw(out, static_cast<std::uint64_t>(seq.frames.size()));
  for (const Face& f : seq.faces)
    for (int k = 0; k < 3; ++k) writeRaw(out, static_cast<std::uint32_t>(f[k]));
  for (const Positions& frame : seq.frames)
    for (const Vec3& p : frame)
      for (int k = 0; k < 3; ++k) writeRaw(out, p[k]);
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

const std::vector<std::string> kStatsEnergyColumns = {
    "stretch", "bend", "gravity", "inertia", "bodyCollision", "friction", "repulsion", "icLoss"};

void writeStatsCsv(const std::vector<FrameStats>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << "frame,intersectingPairs,icLoss";
  for (const std::string& c : kStatsEnergyColumns) out << ",energy_" << c;
  out << ",innerIters,wallTimeMs\n";
  for (const FrameStats& r : records) {
    out << r.frame << "," << r.intersectingPairs << "," << formatDouble(r.icLoss);
    for (const std::string& c : kStatsEnergyColumns) {
      const auto it = r.perTermEnergy.find(c);
      out << "," << formatDouble(it == r.perTermEnergy.end() ? 0.0 : it->second);
    }
    out << "," << r.innerIters << "," << formatDouble(r.wallTimeMs) << "\n";
  }
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

std::vector<FrameStats> readStatsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, path + ": missing header");

  std::vector<FrameStats> records;
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5 + kStatsEnergyColumns.size())
      parseFail(path, lineNo, "unexpected column count");
    FrameStats r;
    std::size_t k = 0;
    r.frame = std::stoi(cells[k++]);
    r.intersectingPairs = std::stoi(cells[k++]);
    r.icLoss = std::stod(cells[k++]);
    for (const std::string& c : kStatsEnergyColumns) r.perTermEnergy[c] = std::stod(cells[k++]);
    r.innerIters = std::stoi(cells[k++]);
    r.wallTimeMs = std::stod(cells[k++]);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

// Strict key checking: a typo in a config file is an error, not a default.
void requireKeys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ErrorCode::UnknownConfigKey, "unknown config key '" + where + key + "'");
  }
}

Vec3 vec3FromJson(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::ParseError, "expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::string icModeName(IcGradientMode mode) {
  switch (mode) {
    case IcGradientMode::TranslationalOnly: return "translational";
    case IcGradientMode::Full: return "full";
    case IcGradientMode::DistortionalOnly: return "distortional";
  }
  return "translational";
}

IcGradientMode icModeFromName(const std::string& name) {
  if (name == "translational") return IcGradientMode::TranslationalOnly;
  if (name == "full") return IcGradientMode::Full;
  if (name == "distortional") return IcGradientMode::DistortionalOnly;
  fail(ErrorCode::ParseError, "unknown icMode '" + name + "'");
}

std::string ablationName(Ablation ablation) {
  switch (ablation) {
    case Ablation::Ours: return "ours";
    case Ablation::OnlyRepulsive: return "only-repulsive";
    case Ablation::NoIcLoss: return "no-ic-loss";
    case Ablation::FullGradient: return "full-gradient";
  }
  return "ours";
}

Ablation ablationFromName(const std::string& name) {
  if (name == "ours") return Ablation::Ours;
  if (name == "only-repulsive") return Ablation::OnlyRepulsive;
  if (name == "no-ic-loss") return Ablation::NoIcLoss;
  if (name == "full-gradient") return Ablation::FullGradient;
  fail(ErrorCode::ParseError, "unknown ablation '" + name + "'");
}

SolverConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  requireKeys(root, {"solver", "material"}, "");

  SolverConfig config;
  if (root.contains("solver")) {
    const json& s = root["solver"];
    requireKeys(s,
                {"dt", "lambda1", "lambda2", "maxInnerIters", "graphRefreshEvery", "gradTolerance",
                 "backtracking", "icMode", "xi", "epsCloth", "epsBody", "ablation",
                 "pinnedVertices", "staticIterationCap", "staticGravity"},
                "solver.");
    if (s.contains("dt")) config.dt = s["dt"].get<double>();
    if (s.contains("lambda1")) config.lambda1 = s["lambda1"].get<double>();
    if (s.contains("lambda2")) config.lambda2 = s["lambda2"].get<double>();
    if (s.contains("maxInnerIters")) config.maxInnerIters = s["maxInnerIters"].get<int>();
    if (s.contains("graphRefreshEvery")) config.graphRefreshEvery = s["graphRefreshEvery"].get<int>();
    if (s.contains("gradTolerance")) config.gradTolerance = s["gradTolerance"].get<double>();
    if (s.contains("backtracking")) {
      const json& b = s["backtracking"];
      requireKeys(b, {"shrink", "armijoConstant", "maxHalvings"}, "solver.backtracking.");
      if (b.contains("shrink")) config.backtracking.shrink = b["shrink"].get<double>();
      if (b.contains("armijoConstant"))
        config.backtracking.armijoConstant = b["armijoConstant"].get<double>();
      if (b.contains("maxHalvings")) config.backtracking.maxHalvings = b["maxHalvings"].get<int>();
    }
    if (s.contains("icMode")) config.icMode = icModeFromName(s["icMode"].get<std::string>());
    if (s.contains("xi")) config.xi = s["xi"].get<double>();
    if (s.contains("epsCloth")) config.epsCloth = s["epsCloth"].get<double>();
    if (s.contains("epsBody")) config.epsBody = s["epsBody"].get<double>();
    if (s.contains("ablation")) config.ablation = ablationFromName(s["ablation"].get<std::string>());
    if (s.contains("pinnedVertices"))
      config.pinnedVertices = s["pinnedVertices"].get<std::vector<int>>();
    if (s.contains("staticIterationCap"))
      config.staticIterationCap = s["staticIterationCap"].get<int>();
    if (s.contains("staticGravity")) config.staticGravity = s["staticGravity"].get<bool>();
  }
  if (root.contains("material")) {
    const json& m = root["material"];
    requireKeys(m,
                {"stretchStiffness", "bendStiffness", "density", "bodyCollisionStiffness",
                 "bodyMargin", "frictionCoeff", "gravity"},
                "material.");
    if (m.contains("stretchStiffness"))
      config.material.stretchStiffness = m["stretchStiffness"].get<double>();
    if (m.contains("bendStiffness")) config.material.bendStiffness = m["bendStiffness"].get<double>();
    if (m.contains("density")) config.material.density = m["density"].get<double>();
    if (m.contains("bodyCollisionStiffness"))
      config.material.bodyCollisionStiffness = m["bodyCollisionStiffness"].get<double>();
    if (m.contains("bodyMargin")) config.material.bodyMargin = m["bodyMargin"].get<double>();
    if (m.contains("frictionCoeff")) config.material.frictionCoeff = m["frictionCoeff"].get<double>();
    if (m.contains("gravity")) config.material.gravity = vec3FromJson(m["gravity"]);
  }
  return config;
}

void saveConfig(const std::string& path, const SolverConfig& config) {
  json root;
  json& s = root["solver"];
  s["dt"] = config.dt;
  s["lambda1"] = config.lambda1;
  s["lambda2"] = config.lambda2;
  s["maxInnerIters"] = config.maxInnerIters;
  s["graphRefreshEvery"] = config.graphRefreshEvery;
  s["gradTolerance"] = config.gradTolerance;
  s["backtracking"] = {{"shrink", config.backtracking.shrink},
                       {"armijoConstant", config.backtracking.armijoConstant},
                       {"maxHalvings", config.backtracking.maxHalvings}};
  s["icMode"] = icModeName(config.icMode);
  s["xi"] = config.xi;
  s["epsCloth"] = config.epsCloth;
  s["epsBody"] = config.epsBody;
  s["ablation"] = ablationName(config.ablation);
  s["pinnedVertices"] = config.pinnedVertices;
  s["staticIterationCap"] = config.staticIterationCap;
  s["staticGravity"] = config.staticGravity;

  json& m = root["material"];
  m["stretchStiffness"] = config.material.stretchStiffness;
  m["bendStiffness"] = config.material.bendStiffness;
  m["density"] = config.material.density;
  m["bodyCollisionStiffness"] = config.material.bodyCollisionStiffness;
  m["bodyMargin"] = config.material.bodyMargin;
  m["frictionCoeff"] = config.material.frictionCoeff;
  m["gravity"] = {config.material.gravity[0], config.material.gravity[1],
                  config.material.gravity[2]};

  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << root.dump(2) << "\n";
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

}  // namespace ccloth
