#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "spherevar/spectrum.hpp"
#include "spherevar/willmore.hpp"

namespace spherevar {

using Json = nlohmann::json;

// %.17g rendering: round-trips every double, byte-identical across reruns.
std::string formatNumber(double v);
std::string formatNumber(long long v);

// RFC-4180 table: CRLF row endings, quoting only where required.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void addRow(std::vector<std::string> cells);
  std::string serialize() const;
};

void writeFile(const std::filesystem::path& path, const std::string& content);
std::string readFile(const std::filesystem::path& path);

// Grid/field snapshots: {dim, resolution, nodes, weights, values}.
Json gridToJson(const QuadratureGrid& grid);
Json fieldToJson(const ScalarField& field);
// Rebuilds the canonical grid and checks the stored nodes/weights against it.
ScalarField fieldFromJson(const Json& j);

// OFF export (LF endings, the format's convention).
std::string meshToOff(const TriMesh& mesh);

// CSV layouts used by the batch runner.
CsvTable willmoreCurveCsv(const WillmoreCurve& curve);                 // t,value,error_estimate
CsvTable scanCsv(const ScanReport& report);                           // sample_id,value,error_estimate
CsvTable spectrumCsv(const SpectrumResult& result,
                     const Eigen::VectorXd& refinementDelta);         // index,eigenvalue,residual,refinement_delta

Json scanReportJson(const ScanReport& report);
Json willmoreCurveJson(const WillmoreCurve& curve, const SpectralSecondVariation& spectral);

// The "f" block of a config: which direction field to perturb along.
struct DirectionSpec {
  std::string type = "harmonic";  // harmonic | zonal | random | expression
  int l = 2;                      // harmonic degree (n = 2)
  int m = 0;                      // harmonic order
  int degree = 2;                 // zonal degree
  int kmax = 6;                   // random band limit
  std::uint64_t seed = 1;         // random draw seed
  std::string expression;         // harmonic expression text
};

// Check tolerances; defaults match the advertised claims, config can tighten.
struct Tolerances {
  double lemmaRel = 1e-7;
  double volumeRel = 1e-10;
  double phiFd = 1e-6;
  double firstVariation = 1e-6;
  double secondVariationRel = 1e-4;
  double willmoreFloor = 1e-8;
  double chainSlack = 2e-2;
  double maximality = 1e-3;
};

struct ExperimentConfig {
  int n = 2;
  int resolution = 24;        // quadrature resolution
  int depth = 5;              // FEM icosphere depth
  int zonalResolution = 512;  // 1-D solver resolution
  DirectionSpec f;
  std::vector<double> tGrid = {-0.08, -0.05, -0.02, 0.0, 0.02, 0.05, 0.08};
  std::uint64_t seed = 1;
  int samples = 100;
  double amplitude = 0.2;
  std::string operatorName = "jacobi";  // jacobi | schroedinger | laplace
  int threads = 1;
  int lemmaSamples = 100;
  std::string debugFlipSign;  // lemma item to negate; self-test hook
  Tolerances tolerances;
};

// Strict parse: unknown keys are rejected by name, type errors name the key.
ExperimentConfig configFromJson(const Json& j);
// File parse; syntax errors are reported with line and column context.
ExperimentConfig loadConfig(const std::filesystem::path& path);
// Full echo, every default filled in.
Json configToJson(const ExperimentConfig& config);

// Builds the direction field described by config.f.
FuncPtr makeDirection(const ExperimentConfig& config, const QuadratureGrid& grid);

OperatorKind operatorFromName(const std::string& name);

}  // namespace spherevar
