#pragma once

// JSON forms of instances, splits and reports.
//
// Instance schema ("ldlab.instance/1"):
//   { "schema", "model": {kind, n, <fields of that kind>}, "planted": bool,
//     "format": "dense" | "edge_list",
//     "observation": [layer...]      dense: rows of numbers, complex entries as [re, im]
//                                    edge_list: {"n": side, "edges": [[i, j], ...]} with i < j
//     "latent": {...}                optional: theta, labels, layer_labels, phases, blocks
//     "split": {...} }               only on split output: kind, params, external_seed, A, B
// Non-finite numbers are written as the strings "inf", "-inf", "nan".

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "ldlab/advantage.hpp"
#include "ldlab/detect.hpp"
#include "ldlab/errors.hpp"
#include "ldlab/model.hpp"
#include "ldlab/split.hpp"

namespace ldlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kInstanceSchema = "ldlab.instance/1";

inline Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double num_from(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
    fail(ErrorCode::ConfigParse, "expected a number, got string '" + s + "'");
  }
  return j.get<double>();
}

// ---------------------------------------------------------------------------
// ModelSpec

inline Json to_json(const ModelSpec& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  j["n"] = s.n;
  switch (s.kind) {
    case ModelKind::PlantedSubmatrix:
      j["lambda"] = num(s.lambda);
      j["rho"] = num(s.rho);
      break;
    case ModelKind::PlantedDenseSubgraph:
      j["rho"] = num(s.rho);
      j["p0"] = num(s.p0);
      j["p1"] = num(s.p1);
      break;
    case ModelKind::SBM:
      j["q"] = s.q;
      j["d"] = num(s.d);
      j["lambda"] = num(s.lambda);
      break;
    case ModelKind::AngularSync:
      j["L"] = s.L;
      j["lambda"] = num(s.lambda);
      break;
    case ModelKind::OrthSync:
      j["dim"] = s.dim;
      j["lambda"] = num(s.lambda);
      break;
    case ModelKind::MultiLayerSBM:
      j["q"] = s.q;
      j["rho"] = num(s.rho);
      j["L"] = s.L;
      j["layer_degrees"] = s.layer_degrees;
      j["layer_lambdas"] = s.layer_lambdas;
      break;
  }
  return j;
}

inline ModelSpec model_spec_from_json(const Json& j) {
  const auto kind = parse_model_kind(j.at("kind").get<std::string>());
  if (!kind) fail(ErrorCode::InvalidSpec, "unknown model kind");
  ModelSpec s;
  s.kind = *kind;
  s.n = j.at("n").get<int>();
  if (j.contains("lambda")) s.lambda = num_from(j["lambda"]);
  if (j.contains("rho")) s.rho = num_from(j["rho"]);
  if (j.contains("p0")) s.p0 = num_from(j["p0"]);
  if (j.contains("p1")) s.p1 = num_from(j["p1"]);
  if (j.contains("q")) s.q = j["q"].get<int>();
  if (j.contains("d")) s.d = num_from(j["d"]);
  if (j.contains("dim")) s.dim = j["dim"].get<int>();
  if (j.contains("L")) s.L = j["L"].get<int>();
  if (j.contains("layer_degrees")) s.layer_degrees = j["layer_degrees"].get<std::vector<double>>();
  if (j.contains("layer_lambdas")) s.layer_lambdas = j["layer_lambdas"].get<std::vector<double>>();
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Matrices and observations

inline Json matrix_to_json(const RealMatrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(num(M(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Json matrix_to_json(const ComplexMatrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(Json::array({num(M(i, j).real()), num(M(i, j).imag())}));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline RealMatrix real_matrix_from_json(const Json& rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto c = m ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  RealMatrix M(m, c);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c) fail(ErrorCode::ShapeMismatch, "ragged matrix rows");
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = num_from(rows[i][j]);
  }
  return M;
}

inline ComplexMatrix complex_matrix_from_json(const Json& rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto c = m ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  ComplexMatrix M(m, c);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c) fail(ErrorCode::ShapeMismatch, "ragged matrix rows");
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = Complex(num_from(rows[i][j][0]), num_from(rows[i][j][1]));
  }
  return M;
}

inline Json observation_to_json(const Observation& obs, bool edge_list) {
  Json layers = Json::array();
  if (is_complex(obs)) {
    if (edge_list) fail(ErrorCode::NonBinaryInput, "edge-list format needs a graph observation");
    for (const auto& M : complex_layers(obs)) layers.push_back(matrix_to_json(M));
    return layers;
  }
  for (const auto& M : real_layers(obs)) {
    if (edge_list) {
      Json e = Json::array();
      for (auto [i, j] : to_edge_list(M)) e.push_back(Json::array({i, j}));
      layers.push_back(Json{{"n", M.rows()}, {"edges", std::move(e)}});
    } else {
      layers.push_back(matrix_to_json(M));
    }
  }
  return layers;
}

inline Observation observation_from_json(const Json& layers, const std::string& format, bool complex_entries) {
  if (complex_entries) {
    std::vector<ComplexMatrix> out;
    for (const auto& l : layers) out.push_back(complex_matrix_from_json(l));
    return out;
  }
  std::vector<RealMatrix> out;
  for (const auto& l : layers) {
    if (format == "edge_list") {
      EdgeList e;
      for (const auto& p : l.at("edges")) e.emplace_back(p[0].get<int>(), p[1].get<int>());
      out.push_back(from_edge_list(l.at("n").get<int>(), e));
    } else {
      out.push_back(real_matrix_from_json(l));
    }
  }
  return out;
}

inline Json latent_to_json(const Latent& lat) {
  Json j = Json::object();
  if (lat.theta.size()) j["theta"] = std::vector<double>(lat.theta.data(), lat.theta.data() + lat.theta.size());
  if (!lat.labels.empty()) j["labels"] = lat.labels;
  if (!lat.layer_labels.empty()) j["layer_labels"] = lat.layer_labels;
  if (lat.phases.size()) j["phases"] = std::vector<double>(lat.phases.data(), lat.phases.data() + lat.phases.size());
  if (!lat.blocks.empty()) {
    Json b = Json::array();
    for (const auto& O : lat.blocks) b.push_back(matrix_to_json(O));
    j["blocks"] = std::move(b);
  }
  return j;
}

inline Latent latent_from_json(const Json& j) {
  Latent lat;
  if (j.contains("theta")) {
    const auto v = j["theta"].get<std::vector<double>>();
    lat.theta = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (j.contains("labels")) lat.labels = j["labels"].get<std::vector<int>>();
  if (j.contains("layer_labels")) lat.layer_labels = j["layer_labels"].get<std::vector<std::vector<int>>>();
  if (j.contains("phases")) {
    const auto v = j["phases"].get<std::vector<double>>();
    lat.phases = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (j.contains("blocks"))
    for (const auto& b : j["blocks"]) lat.blocks.push_back(real_matrix_from_json(b));
  return lat;
}

struct InstanceJsonOptions {
  bool edge_list = false;
  bool include_latent = true;
};

inline Json instance_to_json(const ModelSpec& spec, const Instance& inst, const InstanceJsonOptions& opt = {}) {
  Json j;
  j["schema"] = kInstanceSchema;
  j["model"] = to_json(spec);
  j["planted"] = inst.planted;
  j["format"] = opt.edge_list ? "edge_list" : "dense";
  j["observation"] = observation_to_json(inst.observation, opt.edge_list);
  if (opt.include_latent && !inst.latent.empty()) j["latent"] = latent_to_json(inst.latent);
  return j;
}

struct ParsedInstance {
  ModelSpec spec;
  Instance instance;
};

/// Inverse of instance_to_json; theta_matrix is not stored and comes back empty.
inline ParsedInstance instance_from_json(const Json& j) {
  if (j.value("schema", "") != kInstanceSchema) fail(ErrorCode::ConfigParse, "unsupported instance schema");
  ParsedInstance p;
  p.spec = model_spec_from_json(j.at("model"));
  p.instance.kind = p.spec.kind;
  p.instance.planted = j.at("planted").get<bool>();
  p.instance.observation = observation_from_json(j.at("observation"), j.at("format").get<std::string>(),
                                                 p.spec.kind == ModelKind::AngularSync);
  if (j.contains("latent")) p.instance.latent = latent_from_json(j["latent"]);
  return p;
}

inline Json to_json(const SplitParams& sp) {
  if (std::holds_alternative<GaussianSplitParams>(sp))
    return Json{{"kind", "gaussian"}, {"kappa", num(std::get<GaussianSplitParams>(sp).kappa)}};
  const auto& b = std::get<BernoulliSplitParams>(sp);
  return Json{{"kind", "bernoulli"}, {"p", num(b.p)}, {"a", num(b.a)}, {"b", num(b.b)}};
}

/// Instance JSON plus the "split" block.
inline Json split_to_json(const ModelSpec& spec, const Instance& inst, const SplitPair& sp,
                          const InstanceJsonOptions& opt = {}) {
  Json j = instance_to_json(spec, inst, opt);
  Json s = to_json(sp.params);
  s["external_seed"] = sp.external_key;
  s["A"] = observation_to_json(sp.A, opt.edge_list);
  s["B"] = observation_to_json(sp.B, opt.edge_list);
  j["split"] = std::move(s);
  return j;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const AdvantageReport& r) {
  return Json{{"D", r.D},
              {"value", num(r.value)},
              {"stderr", num(r.stderr_)},
              {"method", to_string(r.method)},
              {"meaning", to_string(r.meaning)},
              {"trials", r.trials},
              {"overflow", r.overflow()}};
}

inline Json to_json(const ThresholdReport& r) {
  return Json{{"F_value", num(r.F_value)}, {"sigma_plus", num(r.sigma_plus)}, {"below_threshold", r.below_threshold}};
}

inline Json to_json(const Interval& iv) { return Json::array({num(iv.lo), num(iv.hi)}); }

inline Json to_json(const TestReport& r) {
  Json j;
  j["model"] = r.model;
  j["params"] = to_json(r.spec);
  j["split"] = to_json(r.split);
  j["estimator"] = r.estimator;
  j["threshold"] = Json{{"rule", r.threshold_rule}, {"value", num(r.threshold)}, {"c", num(r.c_used)}};
  j["trials"] = Json{{"P", r.trials_P}, {"Q", r.trials_Q}, {"invalid_P", r.invalid_P}, {"invalid_Q", r.invalid_Q}};
  j["typeI"] = num(r.typeI);
  j["typeI_ci"] = to_json(r.typeI_ci);
  j["typeII"] = num(r.typeII);
  j["typeII_ci"] = Json::array({num(0.0), num(r.typeII_hi)});
  if (r.projection_active)
    j["projection"] = Json{{"mean_iterations", num(r.projection_mean_iterations)},
                           {"infeasible", r.projection_infeasible}};
  j["seed"] = r.seed;
  return j;
}

inline Json to_json(const RateEstimate& r) {
  return Json{{"rate", num(r.rate)}, {"ci", to_json(r.ci)}, {"stderr", num(r.stderr_)}, {"trials", r.trials}};
}

inline Json to_json(const HiddenSampleReport& r) {
  return Json{{"M", r.M}, {"power", to_json(r.power)}, {"false_alarm", to_json(r.false_alarm)}, {"seed", r.seed}};
}

inline Json to_json(const ContiguityInputs& in) {
  return Json{{"adv_sq", num(in.adv_sq)},         {"T", num(in.runtime_exponent)}, {"N", num(in.dimension)},
              {"D", num(in.degree)},              {"C", num(in.heuristic_constant)}, {"type1", num(in.type1)},
              {"type1_floor", num(in.type1_floor)}, {"epsilon", num(in.epsilon)},    {"slack", num(in.slack)}};
}

inline Json to_json(const ContiguityVerdict& v) {
  return Json{{"ruled_out", v.ruled_out},
              {"conditions", Json{{"degree", v.cond_degree}, {"type1", v.cond_type1}, {"epsilon", v.cond_eps}}},
              {"margins", Json{{"degree", num(v.margin_degree)},
                               {"type1", num(v.margin_type1)},
                               {"epsilon", num(v.margin_eps)}}}};
}

inline Json to_json(const ProjectionResult& r) {
  return Json{{"iterations", r.iterations}, {"residual", num(r.residual)}, {"feasible", r.feasible},
              {"norm", num(r.Q_hat.norm())}};
}

}  // namespace ldlab
