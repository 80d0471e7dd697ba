#pragma once

// Config-driven experiment runner: YAML config in, CSV / JSON / SVG and a
// manifest out. Needs yaml-cpp and OpenSSL (libcrypto) at link time.
//
// Config schema (every mapping rejects unknown keys):
//
//   experiment: sample | split | advantage | test | hidden | sweep | verdict
//   id: <name>                 # output file stem; defaults to the experiment kind
//   seed: <u64>                # default 0
//   threads: <n>               # 0 = hardware concurrency (default)
//   output: {dir: <path>}      # default "."
//   model: {kind: <model>, n: ..., <fields of that kind>}
//   sample:    {planted: true, format: dense | edge_list, latent: true}
//   split:     {kind: gaussian | bernoulli, kappa: 0.1, a: 0.5, b: 0.5, p: <base rate>}
//   advantage: {method: <see below>, D: [..] | D_max: <int>, trials: 1000}
//   test:      {estimator: spectral | degree | oracle | zero,
//               threshold: {rule: fixed | correlation | pilot, value: 5, pilot_trials: 50},
//               trials_P: 200, trials_Q: 1000, project: false, project_c: 0.3}
//   hidden:    {M: <int>, trials: 200, false_alarm_trials: 2000,
//               detector: {kind: pipeline | sum, level: 3}}
//   sweep:     {parameter: n | lambda | rho | p0 | p1 | d | q | kappa, values: [..]}
//   verdict:   {adv_sq, T, N, D, C, type1, type1_floor: 0.05, epsilon: 0, slack: 0.01}
//
// Advantage methods: overlap (planted_submatrix), graph_sum (planted_submatrix,
// planted_dense_subgraph), sbm_exact (sbm), surrogate and mc (angular_sync,
// orth_sync), ks_threshold (multilayer_sbm; no D grid).

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ldlab/advantage.hpp"
#include "ldlab/detect.hpp"
#include "ldlab/errors.hpp"
#include "ldlab/model.hpp"
#include "ldlab/random.hpp"
#include "ldlab/serialize.hpp"
#include "ldlab/split.hpp"

#ifndef LDLAB_YAML_CPP_VERSION
#define LDLAB_YAML_CPP_VERSION "unknown"
#endif

namespace ldlab {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr const char* kCsvSchema = "ldlab.csv/1";
inline constexpr const char* kManifestSchema = "ldlab.manifest/1";

enum class ExperimentKind { Sample, Split, Advantage, Test, Hidden, Sweep, Verdict };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Sample: return "sample";
    case ExperimentKind::Split: return "split";
    case ExperimentKind::Advantage: return "advantage";
    case ExperimentKind::Test: return "test";
    case ExperimentKind::Hidden: return "hidden";
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Verdict: return "verdict";
  }
  return "unknown";
}

inline std::optional<ExperimentKind> parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::Sample, ExperimentKind::Split, ExperimentKind::Advantage, ExperimentKind::Test,
                 ExperimentKind::Hidden, ExperimentKind::Sweep, ExperimentKind::Verdict})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct SampleConfig {
  bool planted = true;
  bool edge_list = false;
  bool latent = true;
};

struct AdvantageConfig {
  std::string method;  ///< empty: default for the model
  std::vector<int> D;
  std::size_t trials = 1000;
};

struct TestConfig {
  EstimatorKind estimator = EstimatorKind::Spectral;
  ThresholdRule threshold;
  std::size_t trials_P = 200;
  std::size_t trials_Q = 1000;
  bool project = false;
  double project_c = 0.3;
};

struct HiddenConfig {
  int M = 1;
  std::size_t trials = 200;
  std::size_t false_alarm_trials = 2000;
  std::string detector = "pipeline";
  double level = 3.0;
};

struct SweepConfig {
  std::string parameter;
  std::vector<double> values;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Advantage;
  std::string id;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output_dir = ".";
  bool has_model = false;
  ModelSpec model;
  SampleConfig sample;
  std::optional<SplitParams> split;
  std::optional<double> split_p;  ///< explicit Bernoulli base rate
  AdvantageConfig advantage;
  TestConfig test;
  HiddenConfig hidden;
  SweepConfig sweep;
  ContiguityInputs verdict;
};

// ---------------------------------------------------------------------------
// Strict YAML reading

namespace config_detail {

inline std::string where(const YAML::Node& n) {
  if (!n) return "";
  const YAML::Mark m = n.Mark();
  if (m.is_null()) return "";
  return " at line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline void require_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(ErrorCode::ConfigParse, "'" + path + "' must be a mapping" + where(n));
}

/// UnknownField for any key outside `allowed`, reported with its position.
inline void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
  require_map(n, path.empty() ? "<root>" : path);
  for (auto it = n.begin(); it != n.end(); ++it) {
    const auto key = it->first.as<std::string>();
    if (!allowed.count(key)) fail(ErrorCode::UnknownField, "unknown field '" + join(path, key) + "'" + where(it->first));
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& name) {
  if (!n.IsScalar()) fail(ErrorCode::ConfigParse, "field '" + name + "' must be a scalar" + where(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(ErrorCode::ConfigParse, "field '" + name + "' has an invalid value '" + n.Scalar() + "'" + where(n));
  }
}

template <class T>
T get(const YAML::Node& map, const std::string& path, const std::string& key, T fallback) {
  const YAML::Node n = map[key];
  if (!n) return fallback;
  return scalar<T>(n, join(path, key));
}

inline double get_real(const YAML::Node& map, const std::string& path, const std::string& key, double fallback) {
  const double v = get<double>(map, path, key, fallback);
  if (!std::isfinite(v)) fail(ErrorCode::ConfigParse, "field '" + join(path, key) + "' must be finite" + where(map[key]));
  return v;
}

inline long long get_int_min(const YAML::Node& map, const std::string& path, const std::string& key, long long fallback,
                             long long min) {
  const long long v = get<long long>(map, path, key, fallback);
  if (v < min)
    fail(ErrorCode::ConfigParse,
         "field '" + join(path, key) + "' must be at least " + std::to_string(min) + where(map[key]));
  return v;
}

inline std::vector<double> get_real_list(const YAML::Node& map, const std::string& path, const std::string& key) {
  const YAML::Node n = map[key];
  const std::string name = join(path, key);
  if (!n || !n.IsSequence()) fail(ErrorCode::ConfigParse, "field '" + name + "' must be a list" + where(n ? n : map));
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double v = scalar<double>(n[i], name + "[" + std::to_string(i) + "]");
    if (!std::isfinite(v)) fail(ErrorCode::ConfigParse, "field '" + name + "' entries must be finite" + where(n[i]));
    out.push_back(v);
  }
  return out;
}

inline std::set<std::string> model_fields(ModelKind k) {
  switch (k) {
    case ModelKind::PlantedSubmatrix: return {"kind", "n", "lambda", "rho"};
    case ModelKind::PlantedDenseSubgraph: return {"kind", "n", "rho", "p0", "p1"};
    case ModelKind::SBM: return {"kind", "n", "q", "d", "lambda"};
    case ModelKind::AngularSync: return {"kind", "n", "L", "lambda"};
    case ModelKind::OrthSync: return {"kind", "n", "dim", "lambda"};
    case ModelKind::MultiLayerSBM: return {"kind", "n", "q", "rho", "layer_degrees", "layer_lambdas"};
  }
  return {};
}

inline ModelSpec parse_model(const YAML::Node& n) {
  require_map(n, "model");
  const YAML::Node kn = n["kind"];
  if (!kn) fail(ErrorCode::ConfigParse, "field 'model.kind' is required" + where(n));
  const auto kind = parse_model_kind(scalar<std::string>(kn, "model.kind"));
  if (!kind) fail(ErrorCode::ConfigParse, "field 'model.kind' names no known model" + where(kn));
  check_keys(n, "model", model_fields(*kind));
  for (const auto& f : model_fields(*kind))
    if (!n[f]) fail(ErrorCode::ConfigParse, "field 'model." + f + "' is required for " + to_string(*kind) + where(n));
  ModelSpec s;
  s.kind = *kind;
  s.n = static_cast<int>(get_int_min(n, "model", "n", 1, 1));
  s.lambda = get_real(n, "model", "lambda", 0.0);
  s.rho = get_real(n, "model", "rho", 0.0);
  s.p0 = get_real(n, "model", "p0", 0.0);
  s.p1 = get_real(n, "model", "p1", 0.0);
  s.q = static_cast<int>(get_int_min(n, "model", "q", 2, 2));
  s.d = get_real(n, "model", "d", 0.0);
  s.dim = static_cast<int>(get_int_min(n, "model", "dim", 1, 1));
  s.L = static_cast<int>(get_int_min(n, "model", "L", 1, 1));
  if (s.kind == ModelKind::MultiLayerSBM) {
    s.layer_degrees = get_real_list(n, "model", "layer_degrees");
    s.layer_lambdas = get_real_list(n, "model", "layer_lambdas");
    s.L = static_cast<int>(s.layer_degrees.size());
  }
  validate(s);
  return s;
}

}  // namespace config_detail

/// Parses YAML config text; errors carry the offending field and position.
inline ExperimentConfig parse_config(const std::string& text) {
  using namespace config_detail;
  YAML::Node loaded;
  try {
    loaded = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorCode::ConfigParse, std::string("malformed YAML at line ") + std::to_string(e.mark.line + 1) +
                                     ", column " + std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  const YAML::Node root = loaded;  // const access never inserts keys
  if (!root || !root.IsMap()) fail(ErrorCode::ConfigParse, "config must be a mapping");

  ExperimentConfig c;
  const YAML::Node en = root["experiment"];
  if (!en) fail(ErrorCode::ConfigParse, "field 'experiment' is required");
  const auto kind = parse_experiment_kind(scalar<std::string>(en, "experiment"));
  if (!kind) fail(ErrorCode::ConfigParse, "field 'experiment' names no known experiment" + where(en));
  c.kind = *kind;

  std::set<std::string> allowed = {"experiment", "id", "seed", "threads", "output"};
  switch (c.kind) {
    case ExperimentKind::Sample: allowed.insert({"model", "sample"}); break;
    case ExperimentKind::Split: allowed.insert({"model", "sample", "split"}); break;
    case ExperimentKind::Advantage: allowed.insert({"model", "advantage"}); break;
    case ExperimentKind::Test: allowed.insert({"model", "split", "test"}); break;
    case ExperimentKind::Hidden: allowed.insert({"model", "split", "test", "hidden"}); break;
    case ExperimentKind::Sweep: allowed.insert({"model", "split", "test", "sweep"}); break;
    case ExperimentKind::Verdict: allowed.insert({"verdict"}); break;
  }
  check_keys(root, "", allowed);

  c.id = get<std::string>(root, "", "id", to_string(c.kind));
  if (c.id.empty() || c.id.find_first_of("/\\") != std::string::npos || c.id == "." || c.id == "..")
    fail(ErrorCode::ConfigParse, "field 'id' must be a plain file stem" + where(root["id"]));
  c.seed = get<std::uint64_t>(root, "", "seed", 0);
  c.threads = static_cast<unsigned>(get_int_min(root, "", "threads", 0, 0));
  if (const YAML::Node o = root["output"]) {
    check_keys(o, "output", {"dir"});
    c.output_dir = get<std::string>(o, "output", "dir", ".");
  }

  if (allowed.count("model")) {
    const YAML::Node m = root["model"];
    if (!m) fail(ErrorCode::ConfigParse, "field 'model' is required for this experiment");
    c.model = parse_model(m);
    c.has_model = true;
  }

  if (const YAML::Node s = root["sample"]) {
    check_keys(s, "sample", {"planted", "format", "latent"});
    c.sample.planted = get<bool>(s, "sample", "planted", true);
    const auto fmt = get<std::string>(s, "sample", "format", "dense");
    if (fmt != "dense" && fmt != "edge_list")
      fail(ErrorCode::ConfigParse, "field 'sample.format' must be dense or edge_list" + where(s["format"]));
    c.sample.edge_list = fmt == "edge_list";
    c.sample.latent = get<bool>(s, "sample", "latent", true);
  }

  if (c.has_model) {
    const bool binary = is_binary(c.model.kind);
    const YAML::Node s = root["split"];
    std::string sk = binary ? "bernoulli" : "gaussian";
    if (s) {
      require_map(s, "split");
      sk = get<std::string>(s, "split", "kind", sk);
    }
    if (sk == "gaussian") {
      if (binary) fail(ErrorCode::ConfigParse, "field 'split.kind' must be bernoulli for graph models" + where(s));
      if (s) check_keys(s, "split", {"kind", "kappa"});
      GaussianSplitParams g;
      if (s) g.kappa = get_real(s, "split", "kappa", g.kappa);
      if (!(g.kappa > 0.0)) fail(ErrorCode::ConfigParse, "field 'split.kappa' must be positive" + where(s["kappa"]));
      c.split = g;
    } else if (sk == "bernoulli") {
      if (!binary) fail(ErrorCode::ConfigParse, "field 'split.kind' must be gaussian for real-valued models" + where(s));
      if (s) check_keys(s, "split", {"kind", "a", "b", "p"});
      BernoulliSplitParams b;
      if (s) {
        b.a = get_real(s, "split", "a", b.a);
        b.b = get_real(s, "split", "b", b.b);
        if (s["p"]) c.split_p = get_real(s, "split", "p", 0.0);
      }
      for (auto [name, v] : {std::pair{"a", b.a}, std::pair{"b", b.b}})
        if (!(v > 0.0 && v <= 1.0))
          fail(ErrorCode::ConfigParse, std::string("field 'split.") + name + "' must lie in (0,1]" + where(s[name]));
      c.split = b;
    } else {
      fail(ErrorCode::ConfigParse, "field 'split.kind' must be gaussian or bernoulli" + where(s["kind"]));
    }
  }

  if (c.kind == ExperimentKind::Advantage) {
    const YAML::Node a = root["advantage"];
    if (!a) fail(ErrorCode::ConfigParse, "field 'advantage' is required");
    check_keys(a, "advantage", {"method", "D", "D_max", "trials"});
    c.advantage.method = get<std::string>(a, "advantage", "method", "");
    c.advantage.trials = static_cast<std::size_t>(get_int_min(a, "advantage", "trials", 1000, 1));
    if (a["D"] && a["D_max"]) fail(ErrorCode::ConfigParse, "give either 'advantage.D' or 'advantage.D_max'" + where(a));
    if (a["D"]) {
      for (double v : get_real_list(a, "advantage", "D")) {
        if (v < 0 || v != std::floor(v) || v > 1e6)
          fail(ErrorCode::ConfigParse, "field 'advantage.D' entries must be nonnegative integers" + where(a["D"]));
        c.advantage.D.push_back(static_cast<int>(v));
      }
      if (c.advantage.D.empty()) fail(ErrorCode::ConfigParse, "field 'advantage.D' must not be empty" + where(a["D"]));
    } else if (a["D_max"]) {
      const auto dm = get_int_min(a, "advantage", "D_max", 0, 0);
      for (int D = 0; D <= dm; ++D) c.advantage.D.push_back(D);
    }
  }

  if (c.kind == ExperimentKind::Test || c.kind == ExperimentKind::Hidden || c.kind == ExperimentKind::Sweep) {
    if (const YAML::Node t = root["test"]) {
      check_keys(t, "test", {"estimator", "threshold", "trials_P", "trials_Q", "project", "project_c"});
      const auto est = get<std::string>(t, "test", "estimator", "spectral");
      const auto e = parse_estimator(est);
      if (!e) fail(ErrorCode::ConfigParse, "field 'test.estimator' names no known estimator" + where(t["estimator"]));
      c.test.estimator = *e;
      c.test.trials_P = static_cast<std::size_t>(get_int_min(t, "test", "trials_P", 200, 1));
      c.test.trials_Q = static_cast<std::size_t>(get_int_min(t, "test", "trials_Q", 1000, 1));
      c.test.project = get<bool>(t, "test", "project", false);
      c.test.project_c = get_real(t, "test", "project_c", 0.3);
      if (c.test.project && !is_binary(c.model.kind))
        fail(ErrorCode::ConfigParse, "field 'test.project' applies to graph models only" + where(t["project"]));
      if (const YAML::Node th = t["threshold"]) {
        check_keys(th, "test.threshold", {"rule", "value", "pilot_trials"});
        const auto rule = get<std::string>(th, "test.threshold", "rule", "fixed");
        if (rule == "fixed") c.test.threshold.kind = ThresholdRule::Kind::Fixed;
        else if (rule == "correlation") c.test.threshold.kind = ThresholdRule::Kind::Correlation;
        else if (rule == "pilot") c.test.threshold.kind = ThresholdRule::Kind::Pilot;
        else fail(ErrorCode::ConfigParse, "field 'test.threshold.rule' must be fixed, correlation or pilot" + where(th["rule"]));
        const double dflt = c.test.threshold.kind == ThresholdRule::Kind::Fixed ? 5.0 : 0.3;
        c.test.threshold.value = get_real(th, "test.threshold", "value", dflt);
        c.test.threshold.pilot_trials = static_cast<int>(get_int_min(th, "test.threshold", "pilot_trials", 50, 1));
      }
    }
  }

  if (c.kind == ExperimentKind::Hidden) {
    const YAML::Node h = root["hidden"];
    if (!h) fail(ErrorCode::ConfigParse, "field 'hidden' is required");
    check_keys(h, "hidden", {"M", "trials", "false_alarm_trials", "detector"});
    c.hidden.M = static_cast<int>(get_int_min(h, "hidden", "M", 1, 1));
    c.hidden.trials = static_cast<std::size_t>(get_int_min(h, "hidden", "trials", 200, 1));
    c.hidden.false_alarm_trials = static_cast<std::size_t>(get_int_min(h, "hidden", "false_alarm_trials", 2000, 1));
    if (const YAML::Node d = h["detector"]) {
      check_keys(d, "hidden.detector", {"kind", "level"});
      c.hidden.detector = get<std::string>(d, "hidden.detector", "kind", "pipeline");
      if (c.hidden.detector != "pipeline" && c.hidden.detector != "sum")
        fail(ErrorCode::ConfigParse, "field 'hidden.detector.kind' must be pipeline or sum" + where(d["kind"]));
      c.hidden.level = get_real(d, "hidden.detector", "level", 3.0);
    }
  }

  if (c.kind == ExperimentKind::Sweep) {
    const YAML::Node s = root["sweep"];
    if (!s) fail(ErrorCode::ConfigParse, "field 'sweep' is required");
    check_keys(s, "sweep", {"parameter", "values"});
    c.sweep.parameter = get<std::string>(s, "sweep", "parameter", "");
    static const std::set<std::string> sweepable = {"n", "lambda", "rho", "p0", "p1", "d", "q", "kappa"};
    if (!sweepable.count(c.sweep.parameter))
      fail(ErrorCode::ConfigParse, "field 'sweep.parameter' must be one of n, lambda, rho, p0, p1, d, q, kappa" +
                                       where(s["parameter"] ? s["parameter"] : s));
    const auto fields = model_fields(c.model.kind);
    if (c.sweep.parameter == "kappa" ? is_binary(c.model.kind) : !fields.count(c.sweep.parameter))
      fail(ErrorCode::ConfigParse, "sweep parameter '" + c.sweep.parameter + "' does not exist for model " +
                                       to_string(c.model.kind) + where(s["parameter"]));
    c.sweep.values = get_real_list(s, "sweep", "values");
    if (c.sweep.values.empty()) fail(ErrorCode::ConfigParse, "field 'sweep.values' must not be empty" + where(s["values"]));
  }

  if (c.kind == ExperimentKind::Verdict) {
    const YAML::Node v = root["verdict"];
    if (!v) fail(ErrorCode::ConfigParse, "field 'verdict' is required");
    check_keys(v, "verdict", {"adv_sq", "T", "N", "D", "C", "type1", "type1_floor", "epsilon", "slack"});
    for (const char* k : {"adv_sq", "T", "N", "D", "C", "type1"})
      if (!v[k]) fail(ErrorCode::ConfigParse, std::string("field 'verdict.") + k + "' is required" + where(v));
    auto& in = c.verdict;
    in.adv_sq = get<double>(v, "verdict", "adv_sq", 1.0);  // may be .inf
    in.runtime_exponent = get_real(v, "verdict", "T", 1.0);
    in.dimension = get_real(v, "verdict", "N", 1.0);
    in.degree = get_real(v, "verdict", "D", 1.0);
    in.heuristic_constant = get_real(v, "verdict", "C", 1.0);
    in.type1 = get_real(v, "verdict", "type1", 0.0);
    in.type1_floor = get_real(v, "verdict", "type1_floor", 0.05);
    in.epsilon = get_real(v, "verdict", "epsilon", 0.0);
    in.slack = get_real(v, "verdict", "slack", 0.01);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Output plumbing

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::OutputUnwritable, "SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

/// Write to "<path>.tmp" then rename over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorCode::OutputUnwritable, "cannot create directory " + path.parent_path().string());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::OutputUnwritable, "cannot open " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) fail(ErrorCode::OutputUnwritable, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::OutputUnwritable, "cannot move output into place at " + path.string());
  }
}

inline std::string fmt_num(double x, int digits = 12) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// One CSV row; NaN cells are written empty (not applicable).
struct CsvRow {
  std::string experiment_id, model;
  double n = NAN, lambda = NAN, rho = NAN, p0 = NAN, p1 = NAN, q = NAN, d = NAN, L = NAN, dim = NAN, M = NAN, D = NAN;
  std::string method;
  double value = NAN, stderr_ = NAN;
  double typeI = NAN, typeI_lo = NAN, typeI_hi = NAN, typeII = NAN, typeII_hi = NAN;
  std::uint64_t seed = 0;
};

inline const char* csv_header() {
  return "experiment_id,model,n,lambda,rho,p0,p1,q,d,L,dim,M,D,method,value,stderr,typeI,typeI_lo,typeI_hi,typeII,"
         "typeII_hi,seed\n";
}

inline CsvRow csv_row_for(const std::string& id, const ModelSpec& s, std::uint64_t seed) {
  CsvRow r;
  r.experiment_id = id;
  r.model = to_string(s.kind);
  r.seed = seed;
  r.n = s.n;
  const auto fields = config_detail::model_fields(s.kind);
  if (fields.count("lambda")) r.lambda = s.lambda;
  if (fields.count("rho")) r.rho = s.rho;
  if (fields.count("p0")) r.p0 = s.p0;
  if (fields.count("p1")) r.p1 = s.p1;
  if (fields.count("q")) r.q = s.q;
  if (fields.count("d")) r.d = s.d;
  if (s.kind == ModelKind::AngularSync || s.kind == ModelKind::MultiLayerSBM) r.L = s.L;
  if (fields.count("dim")) r.dim = s.dim;
  return r;
}

inline std::string render_csv(const std::vector<CsvRow>& rows) {
  std::string out = csv_header();
  for (const auto& r : rows) {
    const std::vector<std::string> cells = {
        r.experiment_id, r.model,       fmt_num(r.n),      fmt_num(r.lambda),   fmt_num(r.rho),
        fmt_num(r.p0),   fmt_num(r.p1), fmt_num(r.q),      fmt_num(r.d),        fmt_num(r.L),
        fmt_num(r.dim),  fmt_num(r.M),  fmt_num(r.D),      r.method,            fmt_num(r.value),
        fmt_num(r.stderr_), fmt_num(r.typeI), fmt_num(r.typeI_lo), fmt_num(r.typeI_hi), fmt_num(r.typeII),
        fmt_num(r.typeII_hi), std::to_string(r.seed)};
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out.push_back(',');
      out += cells[k];
    }
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG line charts (viewBox 960x540)

struct ChartSeries {
  std::string name;
  std::string color;
  std::vector<double> x, y;
  std::vector<double> lo, hi;  ///< optional band, same length as x
};

struct ChartSpec {
  std::string title;
  std::string annotation;  ///< second line of the title block
  std::string x_label, y_label;
  std::vector<ChartSeries> series;
  bool fixed_unit_y = false;  ///< y axis pinned to [0,1]
  bool log_y = false;
};

namespace svg_detail {

inline std::string esc(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o.push_back(ch);
    }
  }
  return o;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::vector<double> ticks(double lo, double hi, int target = 5) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step)
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

}  // namespace svg_detail

inline std::string render_svg(const ChartSpec& c) {
  using namespace svg_detail;
  constexpr double W = 960, H = 540, left = 90, right = 190, top = 80, bottom = 70;
  const double pw = W - left - right, ph = H - top - bottom;
  auto ty = [&](double v) { return c.log_y ? std::log10(v) : v; };
  auto usable = [&](double v) { return std::isfinite(v) && (!c.log_y || v > 0.0); };

  double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
  for (const auto& s : c.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      for (double v : {s.y[i], s.lo.empty() ? s.y[i] : s.lo[i], s.hi.empty() ? s.y[i] : s.hi[i]})
        if (usable(v)) {
          ymin = std::min(ymin, ty(v));
          ymax = std::max(ymax, ty(v));
        }
    }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (xmin == xmax) xmin -= 0.5 * std::max(1.0, std::abs(xmin)), xmax += 0.5 * std::max(1.0, std::abs(xmax));
  if (c.fixed_unit_y) {
    ymin = 0.0, ymax = 1.0;
  } else {
    if (!(ymin <= ymax)) ymin = 0, ymax = 1;
    if (ymin == ymax) ymin -= 0.5, ymax += 0.5;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad, ymax += pad;
  }
  auto X = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double v) { return top + ph - (ty(v) - ymin) / (ymax - ymin) * ph; };
  auto Yraw = [&](double t) { return top + ph - (t - ymin) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 540\" width=\"960\" height=\"540\" "
       "font-family=\"sans-serif\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"white\"/>\n";
  o << "<g class=\"title\">\n<text x=\"" << px(left) << "\" y=\"30\" font-size=\"18\">" << esc(c.title) << "</text>\n";
  if (!c.annotation.empty())
    o << "<text class=\"annotation\" x=\"" << px(left) << "\" y=\"54\" font-size=\"13\">" << esc(c.annotation)
      << "</text>\n";
  o << "</g>\n";
  o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<g class=\"axes\" font-size=\"12\">\n";
  for (double t : ticks(xmin, xmax)) {
    o << "<line x1=\"" << px(X(t)) << "\" y1=\"" << px(top + ph) << "\" x2=\"" << px(X(t)) << "\" y2=\""
      << px(top + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << px(X(t)) << "\" y=\"" << px(top + ph + 20) << "\" text-anchor=\"middle\">" << fmt_num(t, 4)
      << "</text>\n";
  }
  for (double t : ticks(ymin, ymax)) {
    o << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(Yraw(t)) << "\" x2=\"" << px(left) << "\" y2=\""
      << px(Yraw(t)) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << px(left - 8) << "\" y=\"" << px(Yraw(t) + 4) << "\" text-anchor=\"end\">"
      << (c.log_y ? "1e" + fmt_num(t, 4) : fmt_num(t, 4)) << "</text>\n";
  }
  o << "<text class=\"xlabel\" x=\"" << px(left + pw / 2) << "\" y=\"" << px(H - 20)
    << "\" text-anchor=\"middle\" font-size=\"14\">" << esc(c.x_label) << "</text>\n";
  o << "<text class=\"ylabel\" x=\"20\" y=\"" << px(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"14\" "
    << "transform=\"rotate(-90 20 " << px(top + ph / 2) << ")\">" << esc(c.y_label) << "</text>\n";
  o << "</g>\n";

  for (std::size_t k = 0; k < c.series.size(); ++k) {
    const auto& s = c.series[k];
    o << "<g class=\"series\" data-name=\"" << esc(s.name) << "\">\n";
    if (!s.lo.empty()) {
      if (s.x.size() == 1) {
        if (usable(s.lo[0]) && usable(s.hi[0]))
          o << "<line class=\"band\" x1=\"" << px(X(s.x[0])) << "\" y1=\"" << px(Y(s.lo[0])) << "\" x2=\""
            << px(X(s.x[0])) << "\" y2=\"" << px(Y(s.hi[0])) << "\" stroke=\"" << s.color
            << "\" stroke-opacity=\"0.4\" stroke-width=\"6\"/>\n";
      } else {
        o << "<polygon class=\"band\" fill=\"" << s.color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i)
          if (usable(s.hi[i])) o << (first ? "" : " ") << px(X(s.x[i])) << "," << px(Y(s.hi[i])), first = false;
        for (std::size_t i = s.x.size(); i-- > 0;)
          if (usable(s.lo[i])) o << (first ? "" : " ") << px(X(s.x[i])) << "," << px(Y(s.lo[i])), first = false;
        o << "\"/>\n";
      }
    }
    if (s.x.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (usable(s.y[i])) o << (first ? "" : " ") << px(X(s.x[i])) << "," << px(Y(s.y[i])), first = false;
      o << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable(s.y[i]))
        o << "<circle class=\"marker\" cx=\"" << px(X(s.x[i])) << "\" cy=\"" << px(Y(s.y[i])) << "\" r=\"4\" fill=\""
          << s.color << "\"/>\n";
    o << "</g>\n";
    const double ly = top + 20 + 22 * static_cast<double>(k);
    o << "<g class=\"legend\"><line x1=\"" << px(W - right + 20) << "\" y1=\"" << px(ly) << "\" x2=\""
      << px(W - right + 45) << "\" y2=\"" << px(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"3\"/>"
      << "<text x=\"" << px(W - right + 52) << "\" y=\"" << px(ly + 4) << "\" font-size=\"13\">" << esc(s.name)
      << "</text></g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

/**
 * Direction is the sign of last minus first; a step against it passes while
 * it stays within 1.96 combined standard errors.
 */
inline bool monotone_trend(const std::vector<double>& y, const std::vector<double>& se) {
  if (y.size() < 2) return true;
  const double dir = y.back() >= y.front() ? 1.0 : -1.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double step = dir * (y[i + 1] - y[i]);
    if (step < -1.96 * std::hypot(se[i], se[i + 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Experiment execution

struct OutputFile {
  std::string name;  ///< relative to the output directory
  std::string content;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> output_dir;
  std::optional<ExperimentKind> expect_kind;  ///< subcommand given on the command line
};

struct RunResult {
  ExperimentKind kind = ExperimentKind::Advantage;
  std::filesystem::path output_dir;
  std::vector<std::string> files;  ///< written, manifest last
};

namespace run_detail {

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline std::string default_method(ModelKind k) {
  switch (k) {
    case ModelKind::PlantedSubmatrix: return "overlap";
    case ModelKind::PlantedDenseSubgraph: return "graph_sum";
    case ModelKind::SBM: return "sbm_exact";
    case ModelKind::AngularSync:
    case ModelKind::OrthSync: return "surrogate";
    case ModelKind::MultiLayerSBM: return "ks_threshold";
  }
  return "";
}

inline OneSidedSetup test_setup(const ExperimentConfig& c, const ModelSpec& spec, const SplitParams& split) {
  OneSidedSetup st;
  st.spec = spec;
  st.estimator = c.test.estimator;
  st.split = split;
  st.threshold = c.test.threshold;
  st.project = c.test.project;
  st.project_c = c.test.project_c;
  st.trials_P = c.test.trials_P;
  st.trials_Q = c.test.trials_Q;
  st.threads = c.threads;
  return st;
}

inline CsvRow test_row(const ExperimentConfig& c, const TestReport& r) {
  CsvRow row = csv_row_for(c.id, r.spec, c.seed);
  row.method = r.estimator + "/" + r.threshold_rule;
  row.value = r.threshold;
  row.typeI = r.typeI;
  row.typeI_lo = r.typeI_ci.lo;
  row.typeI_hi = r.typeI_ci.hi;
  row.typeII = r.typeII;
  row.typeII_hi = r.typeII_hi;
  return row;
}

inline std::vector<OutputFile> run_advantage(const ExperimentConfig& c) {
  const ModelSpec& s = c.model;
  const std::string method = c.advantage.method.empty() ? default_method(s.kind) : c.advantage.method;
  auto bad = [&] {
    fail(ErrorCode::ConfigParse, "advantage method '" + method + "' does not apply to model " + to_string(s.kind));
  };
  std::vector<CsvRow> rows;
  Json reports = Json::array();

  if (method == "ks_threshold") {
    if (s.kind != ModelKind::MultiLayerSBM) bad();
    const ThresholdReport tr = ks_threshold(s.rho, s.layer_degrees, s.layer_lambdas);
    CsvRow row = csv_row_for(c.id, s, c.seed);
    row.method = method;
    row.value = tr.F_value;
    rows.push_back(row);
    reports.push_back(to_json(tr));
  } else {
    if (c.advantage.D.empty()) fail(ErrorCode::ConfigParse, "advantage needs a D grid ('advantage.D' or 'D_max')");
    for (std::size_t gi = 0; gi < c.advantage.D.size(); ++gi) {
      const int D = c.advantage.D[gi];
      AdvantageReport r;
      if (method == "overlap") {
        if (s.kind != ModelKind::PlantedSubmatrix) bad();
        r = adv2_submatrix_overlap(s.n, s.lambda, s.rho, D);
      } else if (method == "graph_sum") {
        if (s.kind == ModelKind::PlantedSubmatrix) r = adv2_graph_sum_binary(s.n, s.lambda, s.rho, D);
        else if (s.kind == ModelKind::PlantedDenseSubgraph)
          r = adv2_graph_sum_binary(s.n, pds_effective_snr(s.p0, s.p1), s.rho, D);
        else bad();
      } else if (method == "sbm_exact") {
        if (s.kind != ModelKind::SBM) bad();
        r = adv2_sbm_exact(s.n, s.q, s.d, s.lambda, D);
      } else if (method == "surrogate") {
        if (s.kind == ModelKind::AngularSync) r = adv2_angular_surrogate(s.L, s.lambda, D);
        else if (s.kind == ModelKind::OrthSync) r = adv2_orth_surrogate(s.dim, s.lambda, D);
        else bad();
      } else if (method == "mc") {
        const RandomStream rng = RandomStream(c.seed, 10).substream(gi);
        if (s.kind == ModelKind::AngularSync)
          r = adv2_angular_mc(s.n, s.L, s.lambda, D, c.advantage.trials, rng, c.threads);
        else if (s.kind == ModelKind::OrthSync)
          r = adv2_orth_mc(s.n, s.dim, s.lambda, D, c.advantage.trials, rng, c.threads);
        else bad();
      } else {
        fail(ErrorCode::ConfigParse, "unknown advantage method '" + method + "'");
      }
      CsvRow row = csv_row_for(c.id, s, c.seed);
      row.D = D;
      row.method = method;
      row.value = r.value;
      row.stderr_ = r.method == AdvMethod::MonteCarlo ? r.stderr_ : NAN;
      rows.push_back(row);
      reports.push_back(to_json(r));
    }
  }

  Json j;
  j["experiment_id"] = c.id;
  j["model"] = to_json(s);
  j["method"] = method;
  j["seed"] = c.seed;
  j["reports"] = reports;
  std::vector<OutputFile> out = {{c.id + ".csv", render_csv(rows)}, {c.id + ".json", dump(j)}};

  if (method != "ks_threshold") {
    ChartSeries ser{"Adv^2 (" + method + ")", "#1f77b4", {}, {}, {}, {}};
    double vmin = HUGE_VAL, vmax = 0.0;
    int first_inf = -1;
    for (const auto& r : rows) {
      ser.x.push_back(r.D);
      ser.y.push_back(r.value);
      if (std::isfinite(r.value)) {
        vmin = std::min(vmin, r.value);
        vmax = std::max(vmax, r.value);
      } else if (first_inf < 0) {
        first_inf = static_cast<int>(r.D);
      }
      if (std::isfinite(r.stderr_)) {
        ser.lo.push_back(r.value - 1.96 * r.stderr_);
        ser.hi.push_back(r.value + 1.96 * r.stderr_);
      }
    }
    if (ser.lo.size() != ser.x.size()) ser.lo.clear(), ser.hi.clear();
    ChartSpec chart;
    chart.title = "Low-degree advantage vs degree: " + std::string(to_string(s.kind));
    chart.annotation = first_inf >= 0 ? "value overflows from D = " + std::to_string(first_inf) : "all values finite";
    chart.x_label = "D";
    chart.y_label = "Adv^2";
    chart.log_y = vmin > 0.0 && vmax / vmin > 100.0;
    chart.series.push_back(std::move(ser));
    out.push_back({c.id + ".svg", render_svg(chart)});
  }
  return out;
}

inline ModelSpec with_parameter(ModelSpec s, const std::string& name, double v) {
  auto as_int = [&] {
    if (v != std::floor(v)) fail(ErrorCode::ConfigParse, "sweep value for '" + name + "' must be an integer");
    return static_cast<int>(v);
  };
  if (name == "n") s.n = as_int();
  else if (name == "lambda") s.lambda = v;
  else if (name == "rho") s.rho = v;
  else if (name == "p0") s.p0 = v;
  else if (name == "p1") s.p1 = v;
  else if (name == "d") s.d = v;
  else if (name == "q") s.q = as_int();
  validate(s);
  return s;
}

inline std::vector<OutputFile> run_sweep(const ExperimentConfig& c) {
  std::vector<CsvRow> rows;
  Json reports = Json::array();
  ChartSeries s1{"typeI accuracy", "#1f77b4", {}, {}, {}, {}};
  ChartSeries s2{"typeII error", "#d62728", {}, {}, {}, {}};
  std::vector<double> se;
  for (double v : c.sweep.values) {
    SplitParams split = *c.split;
    ModelSpec spec = c.model;
    if (c.sweep.parameter == "kappa") std::get<GaussianSplitParams>(split).kappa = v;
    else spec = with_parameter(spec, c.sweep.parameter, v);
    const TestReport r = run_one_sided_experiment(test_setup(c, spec, split), c.seed);
    rows.push_back(test_row(c, r));
    reports.push_back(to_json(r));
    s1.x.push_back(v);
    s1.y.push_back(r.typeI);
    s1.lo.push_back(r.typeI_ci.lo);
    s1.hi.push_back(r.typeI_ci.hi);
    s2.x.push_back(v);
    s2.y.push_back(r.typeII);
    s2.lo.push_back(r.typeII_lo);
    s2.hi.push_back(r.typeII_hi);
    se.push_back(r.trials_P ? std::sqrt(r.typeI * (1 - r.typeI) / r.trials_P) : 0.0);
  }
  // The trend check reads the rows in increasing parameter order.
  std::vector<std::size_t> ord(c.sweep.values.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](auto a, auto b) { return c.sweep.values[a] < c.sweep.values[b]; });
  std::vector<double> ys, ses;
  for (auto i : ord) ys.push_back(s1.y[i]), ses.push_back(se[i]);
  const bool mono = monotone_trend(ys, ses);
  for (auto* s : {&s1, &s2}) {
    ChartSeries t = *s;
    for (std::size_t k = 0; k < ord.size(); ++k) {
      t.x[k] = s->x[ord[k]];
      t.y[k] = s->y[ord[k]];
      t.lo[k] = s->lo[ord[k]];
      t.hi[k] = s->hi[ord[k]];
    }
    *s = std::move(t);
  }
  ChartSpec chart;
  chart.title = "One-sided test errors vs " + c.sweep.parameter + ": " + to_string(c.model.kind);
  chart.annotation = std::string("monotone-trend check (typeI accuracy): ") + (mono ? "pass" : "fail");
  chart.x_label = c.sweep.parameter;
  chart.y_label = "rate";
  chart.fixed_unit_y = true;
  chart.series = {s1, s2};

  Json j;
  j["experiment_id"] = c.id;
  j["parameter"] = c.sweep.parameter;
  j["values"] = c.sweep.values;
  j["monotone_trend"] = mono;
  j["reports"] = reports;
  return {{c.id + ".csv", render_csv(rows)}, {c.id + ".json", dump(j)}, {c.id + ".svg", render_svg(chart)}};
}

inline std::vector<OutputFile> run_hidden(const ExperimentConfig& c) {
  const ModelSpec& s = c.model;
  Detector det;
  if (c.hidden.detector == "sum") {
    const double p = is_binary(s.kind) ? base_rate(s) : 0.0;
    const double var = is_binary(s.kind) ? p * (1.0 - p) : 1.0;
    if (s.kind == ModelKind::AngularSync) fail(ErrorCode::ConfigParse, "sum detector needs a real-valued observation");
    det = sum_detector(c.hidden.level, p, var);
  } else {
    auto st = test_setup(c, s, *c.split);
    const ResolvedThreshold rt = resolve_threshold(st, c.seed);
    det = pipeline_detector(std::make_shared<const OneSidedTest>(st, rt.coefficient));
  }
  const RateEstimate eps = measure_false_alarm(s, det, c.hidden.false_alarm_trials, c.seed, c.threads);
  const HiddenSampleReport h = hidden_sample_experiment(s, c.hidden.M, det, c.hidden.trials, c.seed, c.threads);
  CsvRow row = csv_row_for(c.id, s, c.seed);
  row.M = c.hidden.M;
  row.method = "hidden_or/" + c.hidden.detector;
  row.value = eps.rate;
  row.stderr_ = eps.stderr_;
  row.typeI = h.power.rate;
  row.typeI_lo = h.power.ci.lo;
  row.typeI_hi = h.power.ci.hi;
  row.typeII = h.false_alarm.rate;
  row.typeII_hi = wilson_upper(static_cast<std::size_t>(std::llround(h.false_alarm.rate * h.false_alarm.trials)),
                               h.false_alarm.trials);
  Json j = to_json(h);
  j["experiment_id"] = c.id;
  j["model"] = to_json(s);
  j["detector"] = c.hidden.detector;
  j["per_sample_false_alarm"] = to_json(eps);
  j["union_bound"] = num(std::min(1.0, c.hidden.M * eps.rate));
  return {{c.id + ".csv", render_csv({row})}, {c.id + ".json", dump(j)}};
}

inline std::vector<OutputFile> run_kind(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::Sample: {
      RandomStream rng(c.seed, 20);
      const Instance inst = c.sample.planted ? sample_planted(c.model, rng) : sample_null(c.model, rng);
      InstanceJsonOptions opt{c.sample.edge_list, c.sample.latent};
      return {{c.id + ".json", dump(instance_to_json(c.model, inst, opt))}};
    }
    case ExperimentKind::Split: {
      RandomStream rng(c.seed, 20);
      const Instance inst = c.sample.planted ? sample_planted(c.model, rng) : sample_null(c.model, rng);
      RandomStream srng(c.seed, 21);
      SplitPair sp;
      if (std::holds_alternative<GaussianSplitParams>(*c.split)) {
        sp = gaussian_split(inst.observation, c.model, std::get<GaussianSplitParams>(*c.split), srng);
      } else {
        BernoulliSplitParams b = std::get<BernoulliSplitParams>(*c.split);
        b.p = c.split_p.value_or(base_rate(c.model));
        sp = bernoulli_split(inst.observation, b, srng);
      }
      InstanceJsonOptions opt{c.sample.edge_list, c.sample.latent};
      return {{c.id + ".json", dump(split_to_json(c.model, inst, sp, opt))}};
    }
    case ExperimentKind::Advantage:
      return run_advantage(c);
    case ExperimentKind::Test: {
      const TestReport r = run_one_sided_experiment(test_setup(c, c.model, *c.split), c.seed);
      return {{c.id + ".csv", render_csv({test_row(c, r)})}, {c.id + ".json", dump(to_json(r))}};
    }
    case ExperimentKind::Hidden:
      return run_hidden(c);
    case ExperimentKind::Sweep:
      return run_sweep(c);
    case ExperimentKind::Verdict: {
      const ContiguityVerdict v = contiguity_verdict(c.verdict);
      Json j;
      j["experiment_id"] = c.id;
      j["inputs"] = to_json(c.verdict);
      j["verdict"] = to_json(v);
      return {{c.id + ".json", dump(j)}};
    }
  }
  return {};
}

}  // namespace run_detail

inline std::string render_manifest(const ExperimentConfig& c, const std::string& config_text,
                                   const std::vector<OutputFile>& files) {
  Json j;
  j["schema"] = kManifestSchema;
  j["experiment_id"] = c.id;
  j["experiment"] = to_string(c.kind);
  j["seed"] = c.seed;
  j["config_sha256"] = sha256_hex(config_text);
  j["csv_schema"] = kCsvSchema;
  j["versions"] = Json{{"ldlab", kLibraryVersion},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                     std::to_string(EIGEN_MINOR_VERSION)},
                       {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                       {"yaml_cpp", LDLAB_YAML_CPP_VERSION}};
  Json list = Json::array();
  for (const auto& f : files)
    list.push_back(Json{{"path", f.name}, {"sha256", sha256_hex(f.content)}, {"bytes", f.content.size()}});
  j["files"] = list;
  return j.dump(2) + "\n";
}

/// Runs an already-parsed config; every output is rendered before the first write.
inline RunResult run_experiment(ExperimentConfig c, const std::string& config_text, const RunOverrides& ov = {}) {
  if (ov.expect_kind && *ov.expect_kind != c.kind)
    fail(ErrorCode::ConfigParse, std::string("config describes a '") + to_string(c.kind) + "' experiment, not '" +
                                     to_string(*ov.expect_kind) + "'");
  if (ov.seed) c.seed = *ov.seed;
  if (ov.threads) c.threads = *ov.threads;
  if (ov.output_dir) c.output_dir = *ov.output_dir;

  std::vector<OutputFile> files = run_detail::run_kind(c);
  const std::string manifest = render_manifest(c, config_text, files);

  RunResult res;
  res.kind = c.kind;
  res.output_dir = c.output_dir;
  for (const auto& f : files) {
    write_atomic(res.output_dir / f.name, f.content);
    res.files.push_back(f.name);
  }
  write_atomic(res.output_dir / "manifest.json", manifest);
  res.files.push_back("manifest.json");
  return res;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::ConfigParse, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline RunResult run_config(const std::filesystem::path& path, const RunOverrides& ov = {}) {
  const std::string text = read_text_file(path);
  return run_experiment(parse_config(text), text, ov);
}

}  // namespace ldlab
