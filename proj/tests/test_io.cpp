#include <cstdio>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "spherevar/io.hpp"

using namespace spherevar;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("spherevar_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("formatNumber round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, 3.141592653589793, -2.718281828459045e-17, 0.0, 12.0, -4e300}) {
    std::string s = formatNumber(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(formatNumber(42.0) == "42");
  CHECK(formatNumber(static_cast<long long>(-7)) == "-7");
}

TEST_CASE("CSV serialization follows RFC 4180") {
  CsvTable t;
  t.header = {"a", "b"};
  t.addRow({"1", "plain"});
  t.addRow({"2", "with,comma"});
  t.addRow({"3", "with\"quote"});
  t.addRow({"4", "with\nnewline"});
  std::string s = t.serialize();
  CHECK(s == "a,b\r\n1,plain\r\n2,\"with,comma\"\r\n3,\"with\"\"quote\"\r\n4,\"with\nnewline\"\r\n");
  CHECK_THROWS(t.addRow({"only-one-cell"}));
}

TEST_CASE("file writes round-trip bytes") {
  TempDir tmp;
  std::string payload = "line1\r\nline2\nbinary\0tail";
  payload.resize(24);
  writeFile(tmp.path / "blob.bin", payload);
  CHECK(readFile(tmp.path / "blob.bin") == payload);
  CHECK_THROWS(readFile(tmp.path / "missing.bin"));
}

TEST_CASE("field snapshots round-trip through JSON") {
  GridPtr grid = QuadratureGrid::make(2, 8);
  ScalarField field = sampleField(std::make_shared<SphericalHarmonic>(2, 1), grid);
  Json j = fieldToJson(field);
  ScalarField back = fieldFromJson(j);
  CHECK(back.grid->dim() == 2);
  CHECK(back.grid->resolution() == 8);
  CHECK((back.values - field.values).cwiseAbs().maxCoeff() == 0.0);

  Json corrupted = j;
  corrupted["weights"][0] = 99.0;
  CHECK_THROWS(fieldFromJson(corrupted));
}

TEST_CASE("mesh export emits a valid OFF header") {
  TriMesh mesh = buildMesh(SphereShape(2, 1.0), 3);
  std::string off = meshToOff(mesh);
  CHECK(off.substr(0, 4) == "OFF\n");
  std::string counts = "642 1280 0";
  CHECK(off.find(counts) != std::string::npos);
  CHECK(off.find('\r') == std::string::npos);
}

TEST_CASE("report tables use the documented schemas") {
  WillmoreCurve curve;
  curve.points = {{-0.1, 2.5, 1e-9}, {0.0, 2.0, 0.0}};
  CsvTable wc = willmoreCurveCsv(curve);
  CHECK(wc.header == std::vector<std::string>{"t", "value", "error_estimate"});
  CHECK(wc.rows.size() == 2);

  ScanReport report;
  report.samples = {{0, 2.2, 0.2, false, false, 2.2, 0.0}};
  report.minW = 2.2;
  report.argmin = 0;
  CsvTable sc = scanCsv(report);
  CHECK(sc.header == std::vector<std::string>{"sample_id", "value", "error_estimate"});
  Json sj = scanReportJson(report);
  CHECK(sj.contains("min_w"));
  CHECK(sj.contains("violations"));
  CHECK(sj.contains("rejected"));
  CHECK(sj.contains("near_equality_count"));

  SpectrumResult res;
  res.eigenvalues = Eigen::Vector2d(-2.0, 0.01);
  res.residuals = Eigen::Vector2d(1e-11, 1e-11);
  res.eigenvectors = Eigen::MatrixXd::Zero(3, 2);
  CsvTable spc = spectrumCsv(res, Eigen::Vector2d(1e-4, 2e-4));
  CHECK(spc.header ==
        std::vector<std::string>{"index", "eigenvalue", "residual", "refinement_delta"});
  CHECK(spc.rows.size() == 2);

  SpectralSecondVariation sp;
  sp.value = 6.0;
  Json cj = willmoreCurveJson(curve, sp);
  CHECK(cj.contains("fd_first_variation"));
  CHECK(cj.contains("spectral_second_variation"));
  CHECK(cj.contains("used_translation_family"));
  CHECK(cj.contains("modes"));
}

TEST_CASE("config parsing is strict and round-trips") {
  ExperimentConfig defaults = configFromJson(Json::object());
  CHECK(defaults.n == 2);
  CHECK(defaults.resolution == 24);
  CHECK(defaults.depth == 5);
  CHECK(defaults.operatorName == "jacobi");
  CHECK(defaults.tolerances.lemmaRel == 1e-7);

  Json j = {{"n", 3},
            {"resolution", 12},
            {"f", {{"type", "zonal"}, {"degree", 3}}},
            {"t_grid", {-0.05, 0.0, 0.05}},
            {"seed", 9},
            {"operator", "laplace"},
            {"tolerances", {{"chain_slack", 0.05}}}};
  ExperimentConfig cfg = configFromJson(j);
  CHECK(cfg.n == 3);
  CHECK(cfg.f.type == "zonal");
  CHECK(cfg.f.degree == 3);
  CHECK(cfg.tGrid == std::vector<double>{-0.05, 0.0, 0.05});
  CHECK(cfg.seed == 9);
  CHECK(cfg.operatorName == "laplace");
  CHECK(cfg.tolerances.chainSlack == 0.05);
  CHECK(cfg.tolerances.lemmaRel == 1e-7);  // untouched default

  // full echo -> parse -> echo is a fixed point
  Json echo = configToJson(cfg);
  ExperimentConfig cfg2 = configFromJson(echo);
  CHECK(configToJson(cfg2).dump() == echo.dump());

  // unknown keys are named in the error
  Json bad = {{"resolutoin", 10}};
  try {
    configFromJson(bad);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("resolutoin") != std::string::npos);
  }
  CHECK_THROWS(configFromJson(Json{{"n", "two"}}));
  CHECK_THROWS(configFromJson(Json{{"f", {{"type", "unknown-kind"}}}}));
}

TEST_CASE("loadConfig reports line and column on syntax errors") {
  TempDir tmp;
  writeFile(tmp.path / "bad.json", "{\n  \"n\": 2,\n  broken\n}\n");
  try {
    loadConfig(tmp.path / "bad.json");
    FAIL("expected a syntax error");
  } catch (const std::exception& e) {
    std::string msg = e.what();
    CHECK(msg.find("line") != std::string::npos);
  }

  writeFile(tmp.path / "ok.json", "{\"n\": 3, \"zonal_resolution\": 128}\n");
  ExperimentConfig cfg = loadConfig(tmp.path / "ok.json");
  CHECK(cfg.n == 3);
  CHECK(cfg.zonalResolution == 128);
}

TEST_CASE("makeDirection binds every f type") {
  GridPtr grid = QuadratureGrid::make(2, 12);
  ExperimentConfig cfg;

  cfg.f.type = "harmonic";
  cfg.f.l = 2;
  cfg.f.m = 1;
  FuncPtr h = makeDirection(cfg, *grid);
  Eigen::Vector3d p = Eigen::Vector3d(0.3, 0.5, 0.81).normalized();
  CHECK(h->value(p) == doctest::Approx(SphericalHarmonic(2, 1).value(p)).epsilon(1e-13));

  cfg.f.type = "expression";
  cfg.f.expression = "Y(2,0) + 0.5*Y(1,1)";
  FuncPtr ex = makeDirection(cfg, *grid);
  CHECK(ex->value(p) ==
        doctest::Approx(SphericalHarmonic(2, 0).value(p) + 0.5 * SphericalHarmonic(1, 1).value(p))
            .epsilon(1e-13));

  cfg.f.type = "random";
  cfg.f.kmax = 4;
  cfg.f.seed = 5;
  FuncPtr r1 = makeDirection(cfg, *grid);
  FuncPtr r2 = makeDirection(cfg, *grid);
  CHECK(r1->value(p) == r2->value(p));

  ExperimentConfig z;
  z.n = 3;
  z.f.type = "zonal";
  z.f.degree = 2;
  GridPtr g3 = QuadratureGrid::make(3, 8);
  FuncPtr zf = makeDirection(z, *g3);
  CHECK(zf->zonal());

  ExperimentConfig badHarm;
  badHarm.n = 3;
  badHarm.f.type = "harmonic";
  CHECK_THROWS(makeDirection(badHarm, *g3));
}

TEST_CASE("operator names map to kinds") {
  CHECK(operatorFromName("jacobi") == OperatorKind::Jacobi);
  CHECK(operatorFromName("schroedinger") == OperatorKind::SchroedingerII);
  CHECK(operatorFromName("schrodinger") == OperatorKind::SchroedingerII);
  CHECK(operatorFromName("laplace") == OperatorKind::LaplaceOnly);
  CHECK_THROWS(operatorFromName("helmholtz"));
}
