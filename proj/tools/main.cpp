#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spherevar/io.hpp"
#include "spherevar/parallel.hpp"

namespace fs = std::filesystem;
using namespace spherevar;

namespace {

struct CliOverrides {
  std::string configPath;
  std::string outDir = "out";
  int threads = 0;      // 0 keeps the config value
  long long seed = -1;  // < 0 keeps the config value
  int depth = 0;        // 0 keeps the config value
  double tmax = 0.0;    // > 0 replaces t_grid
};

ExperimentConfig resolveConfig(const CliOverrides& o) {
  ExperimentConfig cfg = o.configPath.empty() ? ExperimentConfig{} : loadConfig(o.configPath);
  if (o.threads > 0) cfg.threads = o.threads;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.depth > 0) cfg.depth = o.depth;
  if (o.tmax > 0.0) {
    cfg.tGrid.clear();
    for (int i = -3; i <= 3; ++i) cfg.tGrid.push_back(o.tmax * i / 3.0);
  }
  return cfg;
}

void writeEcho(const ExperimentConfig& cfg, const fs::path& outDir) {
  writeFile(outDir / "config_echo.json", configToJson(cfg).dump(2) + "\n");
}

// Mirrors the error computation of the derivative checks after negating the
// closed form; the self-test hook that must make the named item fail.
void flipClosedForm(DerivativeCheck& chk) {
  double na = 0.0, nb = 0.0, diff = 0.0;
  for (size_t i = 0; i < chk.closedForm.size(); ++i) {
    chk.closedForm[i] = -chk.closedForm[i];
    na += chk.closedForm[i] * chk.closedForm[i];
    nb += chk.jet[i] * chk.jet[i];
    double d = chk.closedForm[i] - chk.jet[i];
    diff += d * d;
  }
  chk.absError = std::sqrt(diff);
  chk.relError = chk.absError / std::max({std::sqrt(na), std::sqrt(nb), 1.0});
}

int cmdVerifyLemmas(const ExperimentConfig& cfg, const fs::path& outDir) {
  GridPtr grid = QuadratureGrid::make(cfg.n, cfg.resolution);
  const int count = std::max(1, cfg.lemmaSamples);

  // Fixed direction unless the config asks for fresh random modes per sample.
  std::optional<RadialVariation> fixedVar;
  if (cfg.f.type != "random") fixedVar.emplace(grid, makeDirection(cfg, *grid));

  std::vector<std::vector<DerivativeCheck>> all(count);
  parallelFor(count, cfg.threads, [&](int i) {
    std::uint64_t s = cfg.seed + static_cast<std::uint64_t>(i) * 1000003ULL;
    Eigen::VectorXd point = randomUnitPoint(cfg.n, s);
    Chart chart = Chart::centeredAt(point);
    Eigen::VectorXd angles = chart.referenceCoords();
    std::optional<RadialVariation> localVar;
    const RadialVariation* var = fixedVar ? &*fixedVar : nullptr;
    if (!var) {
      localVar.emplace(grid, randomBandLimited(cfg.n, cfg.f.kmax, s ^ 0x5bd1e995ULL, *grid));
      var = &*localVar;
    }
    std::vector<DerivativeCheck> checks = firstDerivativeChecks(*var, chart, angles);
    std::vector<DerivativeCheck> second = secondDerivativeChecks(*var, chart, angles);
    checks.insert(checks.end(), second.begin(), second.end());
    if (!cfg.debugFlipSign.empty())
      for (auto& chk : checks)
        if (chk.quantity == cfg.debugFlipSign) flipClosedForm(chk);
    all[i] = std::move(checks);
  });

  // Worst case per item, in the canonical emission order of the first sample.
  std::vector<DerivativeCheck> worst = all[0];
  for (int i = 1; i < count; ++i)
    for (size_t k = 0; k < worst.size(); ++k)
      if (all[i][k].relError > worst[k].relError) worst[k] = all[i][k];

  CsvTable table;
  table.header = {"item", "order", "worst_abs_error", "worst_rel_error", "tolerance", "pass"};
  bool ok = true;
  for (const auto& chk : worst) {
    bool pass = chk.relError <= cfg.tolerances.lemmaRel;
    ok = ok && pass;
    table.addRow({chk.quantity, formatNumber(static_cast<long long>(chk.order)),
                  formatNumber(chk.absError), formatNumber(chk.relError),
                  formatNumber(cfg.tolerances.lemmaRel), pass ? "true" : "false"});
    std::printf("%-8s order %d  rel %.3e  %s\n", chk.quantity.c_str(), chk.order, chk.relError,
                pass ? "ok" : "FAIL");
  }
  writeFile(outDir / "lemmas.csv", table.serialize());
  writeEcho(cfg, outDir);
  std::printf("verify-lemmas: %d samples, %s\n", count, ok ? "all items pass" : "FAILED");
  return ok ? 0 : 1;
}

int cmdWillmoreCurve(const ExperimentConfig& cfg, const fs::path& outDir) {
  GridPtr grid = QuadratureGrid::make(cfg.n, cfg.resolution);
  RadialVariation var(grid, makeDirection(cfg, *grid));
  WillmoreCurve curve = willmoreCurve(var, cfg.tGrid, true);
  SpectralSecondVariation spectral = willmoreSecondVariationSpectral(var);

  writeFile(outDir / "willmore_curve.csv", willmoreCurveCsv(curve).serialize());
  writeFile(outDir / "willmore_curve.json", willmoreCurveJson(curve, spectral).dump(2) + "\n");
  writeEcho(cfg, outDir);

  bool ok = true;
  for (const auto& pt : curve.points) {
    if (pt.value < cfg.n - cfg.tolerances.willmoreFloor) {
      std::printf("FAIL: W(%g) = %.12f below n = %d\n", pt.t, pt.value, cfg.n);
      ok = false;
    }
  }
  if (std::abs(curve.fdFirstVariation) > cfg.tolerances.firstVariation) {
    std::printf("FAIL: |FD W'(0)| = %.3e exceeds %.1e\n", std::abs(curve.fdFirstVariation),
                cfg.tolerances.firstVariation);
    ok = false;
  }
  double rel2 = std::abs(curve.fdSecondVariation - spectral.value) /
                std::max(std::abs(spectral.value), 1.0);
  if (rel2 > cfg.tolerances.secondVariationRel) {
    std::printf("FAIL: FD W''(0) = %.9f vs spectral %.9f (rel %.3e)\n", curve.fdSecondVariation,
                spectral.value, rel2);
    ok = false;
  }
  std::printf("willmore-curve: %zu points, W'(0) fd %.3e, W''(0) fd %.9f spectral %.9f%s, %s\n",
              curve.points.size(), curve.fdFirstVariation, curve.fdSecondVariation, spectral.value,
              curve.usedTranslationFamily ? " (translation family)" : "",
              ok ? "pass" : "FAILED");
  return ok ? 0 : 1;
}

int cmdEigen(const ExperimentConfig& cfg, const fs::path& outDir, bool exportMesh) {
  GridPtr grid = QuadratureGrid::make(cfg.n, cfg.resolution);
  RadialVariation var(grid, makeDirection(cfg, *grid));
  OperatorKind kind = operatorFromName(cfg.operatorName);
  const bool fem = cfg.n == 2;

  struct Row {
    double t = 0.0, lambda1 = 0.0, w = 0.0, slack = 0.0, delta = 0.0, lambda2 = 0.0;
    SpectrumResult fine;
    Eigen::VectorXd deltas;
  };
  const int count = static_cast<int>(cfg.tGrid.size());
  std::vector<Row> rows(count);
  parallelFor(count, cfg.threads, [&](int i) {
    double t = cfg.tGrid[i];
    ShapePtr slice = var.slice(t);
    Row row;
    row.t = t;
    row.w = willmoreNormalized(var, t);
    RefinedSpectrum rs = fem ? refinedFemSpectrum(*slice, cfg.depth, kind, 2)
                             : refinedZonalSpectrum(*slice, cfg.zonalResolution, kind, 1);
    row.lambda1 = rs.fine.eigenvalues(0);
    row.slack = row.lambda1 + row.w;
    row.delta = rs.delta(0);
    if (fem) row.lambda2 = rs.fine.eigenvalues(1);
    row.fine = std::move(rs.fine);
    row.deltas = std::move(rs.delta);
    if (exportMesh && fem) {
      TriMesh mesh = buildMesh(*slice, cfg.depth);
      writeFile(outDir / ("mesh_" + std::to_string(i) + ".off"), meshToOff(mesh));
    }
    rows[i] = std::move(row);
  });

  CsvTable table;
  table.header = {"t", "lambda1", "minus_w", "slack", "refinement_delta"};
  if (fem) table.header.push_back("lambda2");
  bool ok = true;
  for (int i = 0; i < count; ++i) {
    const Row& r = rows[i];
    std::vector<std::string> cells = {formatNumber(r.t), formatNumber(r.lambda1),
                                      formatNumber(-r.w), formatNumber(r.slack),
                                      formatNumber(r.delta)};
    if (fem) cells.push_back(formatNumber(r.lambda2));
    table.addRow(std::move(cells));
    writeFile(outDir / ("spectrum_" + std::to_string(i) + ".csv"),
              spectrumCsv(r.fine, r.deltas).serialize());
    bool chain = r.lambda1 <= -r.w + cfg.tolerances.chainSlack &&
                 r.w >= cfg.n - cfg.tolerances.willmoreFloor;
    if (!chain) {
      std::printf("FAIL: t = %g breaks lambda1 <= -W <= -n (lambda1 %.6f, W %.6f)\n", r.t,
                  r.lambda1, r.w);
      ok = false;
    }
  }
  writeFile(outDir / "eigen.csv", table.serialize());

  Json summary;
  summary["rows"] = Json::array();
  for (const Row& r : rows)
    summary["rows"].push_back({{"t", r.t},
                               {"lambda1", r.lambda1},
                               {"w", r.w},
                               {"slack", r.slack},
                               {"refinement_delta", r.delta}});
  summary["operator"] = cfg.operatorName;
  summary["solver"] = fem ? "fem" : "zonal";
  writeFile(outDir / "eigen.json", summary.dump(2) + "\n");
  writeEcho(cfg, outDir);
  std::printf("eigen: %d rows (%s, %s), %s\n", count, fem ? "fem" : "zonal",
              cfg.operatorName.c_str(), ok ? "chain holds on every row" : "FAILED");
  return ok ? 0 : 1;
}

int cmdConjectureScan(const ExperimentConfig& cfg, const fs::path& outDir) {
  ScanConfig sc;
  sc.n = cfg.n;
  sc.resolution = cfg.resolution;
  sc.samples = cfg.samples;
  sc.amplitude = cfg.amplitude;
  sc.kmax = cfg.f.kmax;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  ScanReport report = conjectureScan(sc);

  writeFile(outDir / "scan.csv", scanCsv(report).serialize());
  writeFile(outDir / "scan.json", scanReportJson(report).dump(2) + "\n");
  writeEcho(cfg, outDir);

  bool ok = report.violations == 0;
  std::printf("conjecture-scan: %d samples, min W = %.12f at sample %d, %d violations, "
              "%d rejected, %s\n",
              sc.samples, report.minW, report.argmin, report.violations, report.rejected,
              ok ? "pass" : "FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume-preserving sphere variations: curvature functionals and spectra"};
  app.fallthrough();
  app.require_subcommand(1);

  CliOverrides o;
  app.add_option("--config", o.configPath, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", o.outDir, "output directory (created if missing)");
  app.add_option("--threads", o.threads, "worker threads for independent cases");
  app.add_option("--seed", o.seed, "override the config seed")->check(CLI::NonNegativeNumber);
  app.add_option("--depth", o.depth, "override the FEM icosphere depth");
  app.add_option("--tmax", o.tmax,
                 "replace t_grid with a symmetric 7-point grid on [-tmax, tmax]");

  CLI::App* verify = app.add_subcommand(
      "verify-lemmas", "check closed-form first/second derivatives at random points and modes");
  CLI::App* curve =
      app.add_subcommand("willmore-curve", "W(t) table with FD and spectral variations");
  CLI::App* eigen = app.add_subcommand(
      "eigen", "lambda1 (and lambda2 for n = 2) against the -W bound over the t grid");
  bool exportMesh = false;
  eigen->add_flag("--export-mesh", exportMesh, "write per-t OFF meshes (n = 2)");
  CLI::App* scan = app.add_subcommand("conjecture-scan", "randomized W >= n evidence scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = resolveConfig(o);
    fs::path outDir = o.outDir;
    fs::create_directories(outDir);
    if (verify->parsed()) return cmdVerifyLemmas(cfg, outDir);
    if (curve->parsed()) return cmdWillmoreCurve(cfg, outDir);
    if (eigen->parsed()) return cmdEigen(cfg, outDir, exportMesh);
    if (scan->parsed()) return cmdConjectureScan(cfg, outDir);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
