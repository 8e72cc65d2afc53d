#include "spherevar/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spherevar {

std::string formatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string formatNumber(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

namespace {

std::string escapeCsv(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void CsvTable::addRow(std::vector<std::string> cells) {
  if (cells.size() != header.size())
    throw std::invalid_argument("CsvTable: row width does not match the header");
  rows.push_back(std::move(cells));
}

std::string CsvTable::serialize() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += escapeCsv(cells[i]);
    }
    out += "\r\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

void writeFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json gridToJson(const QuadratureGrid& grid) {
  Json j;
  j["dim"] = grid.dim();
  j["resolution"] = grid.resolution();
  Json nodes = Json::array();
  for (int i = 0; i < grid.size(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < grid.dim(); ++k) row.push_back(grid.nodes()(i, k));
    nodes.push_back(std::move(row));
  }
  j["nodes"] = std::move(nodes);
  Json weights = Json::array();
  for (int i = 0; i < grid.size(); ++i) weights.push_back(grid.weights()(i));
  j["weights"] = std::move(weights);
  return j;
}

Json fieldToJson(const ScalarField& field) {
  Json j = gridToJson(*field.grid);
  Json values = Json::array();
  for (int i = 0; i < field.values.size(); ++i) values.push_back(field.values(i));
  j["values"] = std::move(values);
  return j;
}

ScalarField fieldFromJson(const Json& j) {
  int dim = j.at("dim").get<int>();
  int resolution = j.at("resolution").get<int>();
  GridPtr grid = QuadratureGrid::make(dim, resolution);
  const Json& nodes = j.at("nodes");
  const Json& weights = j.at("weights");
  const Json& values = j.at("values");
  if (static_cast<int>(nodes.size()) != grid->size() ||
      static_cast<int>(weights.size()) != grid->size() ||
      static_cast<int>(values.size()) != grid->size())
    throw std::runtime_error("fieldFromJson: snapshot size does not match the canonical grid");
  for (int i = 0; i < grid->size(); ++i) {
    for (int k = 0; k < dim; ++k)
      if (std::abs(nodes[i][k].get<double>() - grid->nodes()(i, k)) > 1e-12)
        throw std::runtime_error("fieldFromJson: node mismatch with the canonical grid");
    if (std::abs(weights[i].get<double>() - grid->weights()(i)) > 1e-12)
      throw std::runtime_error("fieldFromJson: weight mismatch with the canonical grid");
  }
  ScalarField field;
  field.grid = grid;
  field.values.resize(grid->size());
  for (int i = 0; i < grid->size(); ++i) field.values(i) = values[i].get<double>();
  return field;
}

std::string meshToOff(const TriMesh& mesh) {
  std::string out = "OFF\n";
  out += formatNumber(static_cast<long long>(mesh.vertices.rows())) + " " +
         formatNumber(static_cast<long long>(mesh.faces.rows())) + " 0\n";
  for (int i = 0; i < mesh.vertices.rows(); ++i) {
    out += formatNumber(mesh.vertices(i, 0)) + " " + formatNumber(mesh.vertices(i, 1)) + " " +
           formatNumber(mesh.vertices(i, 2)) + "\n";
  }
  for (int f = 0; f < mesh.faces.rows(); ++f) {
    out += "3 " + formatNumber(static_cast<long long>(mesh.faces(f, 0))) + " " +
           formatNumber(static_cast<long long>(mesh.faces(f, 1))) + " " +
           formatNumber(static_cast<long long>(mesh.faces(f, 2))) + "\n";
  }
  return out;
}

CsvTable willmoreCurveCsv(const WillmoreCurve& curve) {
  CsvTable t;
  t.header = {"t", "value", "error_estimate"};
  for (const auto& pt : curve.points)
    t.addRow({formatNumber(pt.t), formatNumber(pt.value), formatNumber(pt.errorEstimate)});
  return t;
}

CsvTable scanCsv(const ScanReport& report) {
  CsvTable t;
  t.header = {"sample_id", "value", "error_estimate"};
  for (const auto& s : report.samples)
    t.addRow({formatNumber(static_cast<long long>(s.id)), formatNumber(s.w),
              formatNumber(std::abs(s.wRefined - s.w))});
  return t;
}

CsvTable spectrumCsv(const SpectrumResult& result, const Eigen::VectorXd& refinementDelta) {
  CsvTable t;
  t.header = {"index", "eigenvalue", "residual", "refinement_delta"};
  for (int i = 0; i < result.eigenvalues.size(); ++i) {
    double delta = i < refinementDelta.size() ? refinementDelta(i) : 0.0;
    t.addRow({formatNumber(static_cast<long long>(i + 1)), formatNumber(result.eigenvalues(i)),
              formatNumber(result.residuals(i)), formatNumber(delta)});
  }
  return t;
}

Json scanReportJson(const ScanReport& report) {
  Json j;
  j["config"] = {{"n", report.config.n},
                 {"resolution", report.config.resolution},
                 {"samples", report.config.samples},
                 {"amplitude", report.config.amplitude},
                 {"kmax", report.config.kmax},
                 {"seed", report.config.seed},
                 {"threads", report.config.threads}};
  j["min_w"] = report.minW;
  j["argmin"] = report.argmin;
  j["violations"] = report.violations;
  j["rejected"] = report.rejected;
  int nearEquality = 0;
  for (const auto& s : report.samples)
    if (s.nearEquality) ++nearEquality;
  j["near_equality_count"] = nearEquality;
  return j;
}

Json willmoreCurveJson(const WillmoreCurve& curve, const SpectralSecondVariation& spectral) {
  Json j;
  j["fd_first_variation"] = curve.fdFirstVariation;
  j["fd_second_variation"] = curve.fdSecondVariation;
  j["spectral_second_variation"] = curve.spectralSecondVariation;
  j["used_translation_family"] = curve.usedTranslationFamily;
  j["projection_residual"] = spectral.projectionResidual;
  Json modes = Json::array();
  for (const auto& m : spectral.modes) {
    modes.push_back({{"index", m.index},
                     {"beta", m.beta},
                     {"a", m.a},
                     {"poly_value", m.polyValue},
                     {"contribution", m.contribution}});
  }
  j["modes"] = std::move(modes);
  return j;
}

namespace {

void requireKeys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::runtime_error("config: " + where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      std::string msg = "config: unknown key '" + item.key() + "' in " + where + "; allowed:";
      for (const auto& k : allowed) msg += " " + k;
      throw std::runtime_error(msg);
    }
  }
}

template <class T>
void readKey(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw std::runtime_error("config: bad value for key '" + std::string(key) + "': " + e.what());
  }
}

DirectionSpec directionFromJson(const Json& j) {
  DirectionSpec spec;
  requireKeys(j, {"type", "l", "m", "degree", "kmax", "seed", "expression"}, "f");
  readKey(j, "type", spec.type);
  readKey(j, "l", spec.l);
  readKey(j, "m", spec.m);
  readKey(j, "degree", spec.degree);
  readKey(j, "kmax", spec.kmax);
  readKey(j, "seed", spec.seed);
  readKey(j, "expression", spec.expression);
  if (spec.type != "harmonic" && spec.type != "zonal" && spec.type != "random" &&
      spec.type != "expression")
    throw std::runtime_error("config: f.type must be harmonic, zonal, random, or expression");
  return spec;
}

Tolerances tolerancesFromJson(const Json& j) {
  Tolerances tol;
  requireKeys(j,
              {"lemma_rel", "volume_rel", "phi_fd", "first_variation", "second_variation_rel",
               "willmore_floor", "chain_slack", "maximality"},
              "tolerances");
  readKey(j, "lemma_rel", tol.lemmaRel);
  readKey(j, "volume_rel", tol.volumeRel);
  readKey(j, "phi_fd", tol.phiFd);
  readKey(j, "first_variation", tol.firstVariation);
  readKey(j, "second_variation_rel", tol.secondVariationRel);
  readKey(j, "willmore_floor", tol.willmoreFloor);
  readKey(j, "chain_slack", tol.chainSlack);
  readKey(j, "maximality", tol.maximality);
  return tol;
}

}  // namespace

ExperimentConfig configFromJson(const Json& j) {
  ExperimentConfig cfg;
  requireKeys(j,
              {"n", "resolution", "depth", "zonal_resolution", "f", "t_grid", "seed", "samples",
               "amplitude", "operator", "threads", "lemma_samples", "debug_flip_sign",
               "tolerances"},
              "the top level");
  readKey(j, "n", cfg.n);
  readKey(j, "resolution", cfg.resolution);
  readKey(j, "depth", cfg.depth);
  readKey(j, "zonal_resolution", cfg.zonalResolution);
  if (j.contains("f")) cfg.f = directionFromJson(j.at("f"));
  readKey(j, "t_grid", cfg.tGrid);
  readKey(j, "seed", cfg.seed);
  readKey(j, "samples", cfg.samples);
  readKey(j, "amplitude", cfg.amplitude);
  readKey(j, "operator", cfg.operatorName);
  readKey(j, "threads", cfg.threads);
  readKey(j, "lemma_samples", cfg.lemmaSamples);
  readKey(j, "debug_flip_sign", cfg.debugFlipSign);
  if (j.contains("tolerances")) cfg.tolerances = tolerancesFromJson(j.at("tolerances"));
  if (cfg.n < 2) throw std::runtime_error("config: n must be at least 2");
  operatorFromName(cfg.operatorName);
  return cfg;
}

ExperimentConfig loadConfig(const std::filesystem::path& path) {
  std::string text = readFile(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Map the byte offset to line/column and quote the offending line.
    size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    if (byte > text.size()) byte = text.size();
    int line = 1;
    size_t lineStart = 0;
    for (size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        lineStart = i + 1;
      }
    }
    size_t lineEnd = text.find('\n', lineStart);
    if (lineEnd == std::string::npos) lineEnd = text.size();
    std::ostringstream msg;
    msg << path.string() << ":" << line << ":" << (byte - lineStart + 1) << ": " << e.what()
        << "\n  " << text.substr(lineStart, lineEnd - lineStart);
    throw std::runtime_error(msg.str());
  }
  return configFromJson(j);
}

Json configToJson(const ExperimentConfig& cfg) {
  Json j;
  j["n"] = cfg.n;
  j["resolution"] = cfg.resolution;
  j["depth"] = cfg.depth;
  j["zonal_resolution"] = cfg.zonalResolution;
  j["f"] = {{"type", cfg.f.type},     {"l", cfg.f.l},       {"m", cfg.f.m},
            {"degree", cfg.f.degree}, {"kmax", cfg.f.kmax}, {"seed", cfg.f.seed},
            {"expression", cfg.f.expression}};
  j["t_grid"] = cfg.tGrid;
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["amplitude"] = cfg.amplitude;
  j["operator"] = cfg.operatorName;
  j["threads"] = cfg.threads;
  j["lemma_samples"] = cfg.lemmaSamples;
  j["debug_flip_sign"] = cfg.debugFlipSign;
  j["tolerances"] = {{"lemma_rel", cfg.tolerances.lemmaRel},
                     {"volume_rel", cfg.tolerances.volumeRel},
                     {"phi_fd", cfg.tolerances.phiFd},
                     {"first_variation", cfg.tolerances.firstVariation},
                     {"second_variation_rel", cfg.tolerances.secondVariationRel},
                     {"willmore_floor", cfg.tolerances.willmoreFloor},
                     {"chain_slack", cfg.tolerances.chainSlack},
                     {"maximality", cfg.tolerances.maximality}};
  return j;
}

FuncPtr makeDirection(const ExperimentConfig& config, const QuadratureGrid& grid) {
  const DirectionSpec& f = config.f;
  if (f.type == "harmonic") {
    if (config.n != 2)
      throw std::runtime_error(
          "config: f.type 'harmonic' requires n = 2; use 'zonal' for higher dimensions");
    return std::make_shared<SphericalHarmonic>(f.l, f.m);
  }
  if (f.type == "zonal") return std::make_shared<ZonalHarmonic>(config.n, f.degree);
  if (f.type == "random") return randomBandLimited(config.n, f.kmax, f.seed, grid);
  if (f.type == "expression") return parseHarmonicExpression(config.n, f.expression);
  throw std::runtime_error("config: unsupported f.type '" + f.type + "'");
}

OperatorKind operatorFromName(const std::string& name) {
  if (name == "jacobi") return OperatorKind::Jacobi;
  if (name == "schroedinger" || name == "schrodinger") return OperatorKind::SchroedingerII;
  if (name == "laplace") return OperatorKind::LaplaceOnly;
  throw std::runtime_error("config: operator must be jacobi, schroedinger, or laplace");
}

}  // namespace spherevar
