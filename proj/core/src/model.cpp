#include "rscn/model.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "rscn/error.hpp"

namespace rscn {

using json = nlohmann::json;

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Sigmoid:
      return "sigmoid";
  }
  return "unknown";
}

double activate(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::Sigmoid:
      if (z < 0.0) {
        const double ez = std::exp(z);
        return ez / (1.0 + ez);
      }
      return 1.0 / (1.0 + std::exp(-z));
  }
  return 0.0;
}

namespace {
constexpr double kSigmoidClamp = -700.0;
}  // namespace

void activate_inplace(ActivationKind kind, Eigen::Ref<Eigen::MatrixXd> z) {
  switch (kind) {
    case ActivationKind::Sigmoid:
      // Clamping keeps exp(−z) finite, so outputs never reach exactly 0.
      // Below −700 the true value is under 1e-304 and the clamp is invisible
      // next to any other node output.
      z.array() = (1.0 + (-z.array().max(kSigmoidClamp)).exp()).inverse();
      break;
  }
}

bool operator==(const ScnModel& a, const ScnModel& b) {
  return a.nodes == b.nodes && a.beta.rows() == b.beta.rows() && a.beta.cols() == b.beta.cols() &&
         a.beta == b.beta && a.activation == b.activation && a.input_dim == b.input_dim &&
         a.output_dim == b.output_dim && a.normalization == b.normalization;
}

Vector node_output(const HiddenNode& node, const Matrix& x, ActivationKind kind) {
  if (static_cast<std::size_t>(x.cols()) != node.w.size()) {
    throw ContractViolation("node_output: input has " + std::to_string(x.cols()) + " columns, node expects " +
                            std::to_string(node.w.size()));
  }
  const Eigen::Map<const Vector> w(node.w.data(), static_cast<Eigen::Index>(node.w.size()));
  Eigen::MatrixXd z = x * w;
  z.array() += node.b;
  activate_inplace(kind, z);
  return z.col(0);
}

Matrix hidden_matrix(std::span<const HiddenNode> nodes, const Matrix& x, ActivationKind kind) {
  Matrix h(x.rows(), static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t j = 0; j < nodes.size(); ++j) h.col(static_cast<Eigen::Index>(j)) = node_output(nodes[j], x, kind);
  return h;
}

Matrix forward(const ScnModel& model, const Matrix& x, InputScale scale) {
  if (model.nodes.empty()) throw EmptyModel();
  if (model.beta.rows() != static_cast<Eigen::Index>(model.nodes.size())) {
    throw ContractViolation("forward: beta row count does not match node count");
  }
  if (static_cast<std::size_t>(x.cols()) != model.input_dim) {
    throw ContractViolation("forward: input has " + std::to_string(x.cols()) + " columns, model expects " +
                            std::to_string(model.input_dim));
  }
  const bool raw = scale == InputScale::Raw && model.normalization.has_value();
  if (!raw) return hidden_matrix(model.nodes, x, model.activation) * model.beta;

  const Normalization& norm = *model.normalization;
  Matrix xn(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) xn(i, j) = normalize_value(norm.inputs.at(j), x(i, j));
  Matrix out = hidden_matrix(model.nodes, xn, model.activation) * model.beta;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index q = 0; q < out.cols(); ++q) out(i, q) = denormalize_value(norm.outputs.at(q), out(i, q));
  return out;
}

namespace {

json ranges_to_json(const std::vector<ColumnRange>& ranges) {
  json arr = json::array();
  for (const auto& r : ranges) arr.push_back({r.min, r.max});
  return arr;
}

std::vector<ColumnRange> ranges_from_json(const json& arr) {
  std::vector<ColumnRange> out;
  for (const auto& r : arr) out.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
  return out;
}

}  // namespace

void save_model(const ScnModel& model, std::ostream& sink) {
  json doc;
  doc["format"] = "rscn-model";
  doc["version"] = kModelFormatVersion;
  doc["activation"] = to_string(model.activation);
  doc["input_dim"] = model.input_dim;
  doc["output_dim"] = model.output_dim;
  doc["node_count"] = model.nodes.size();
  json nodes = json::array();
  for (const auto& n : model.nodes) nodes.push_back({{"w", n.w}, {"b", n.b}});
  doc["nodes"] = std::move(nodes);
  json beta = json::array();
  for (Eigen::Index j = 0; j < model.beta.rows(); ++j) {
    json row = json::array();
    for (Eigen::Index q = 0; q < model.beta.cols(); ++q) row.push_back(model.beta(j, q));
    beta.push_back(std::move(row));
  }
  doc["beta"] = std::move(beta);
  if (model.normalization) {
    doc["normalization"] = {{"inputs", ranges_to_json(model.normalization->inputs)},
                            {"outputs", ranges_to_json(model.normalization->outputs)}};
  } else {
    doc["normalization"] = nullptr;
  }
  sink << doc.dump(1) << '\n';
  if (!sink) throw IoError("failed to write model");
}

void save_model(const ScnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_model(model, out);
}

ScnModel load_model(std::istream& source) {
  const std::string text((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  const std::size_t end = text.size();

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DeserializationError(e.byte, e.what());
  }

  try {
    if (!doc.is_object() || doc.value("format", std::string{}) != "rscn-model") {
      throw DeserializationError(end, "not an rscn-model document");
    }
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DeserializationError(end, "unsupported model format version " + std::to_string(version) +
                                          " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
    }
    ScnModel model;
    const auto act = doc.at("activation").get<std::string>();
    if (act != "sigmoid") throw DeserializationError(end, "unknown activation '" + act + "'");
    model.activation = ActivationKind::Sigmoid;
    model.input_dim = doc.at("input_dim").get<std::size_t>();
    model.output_dim = doc.at("output_dim").get<std::size_t>();
    const auto node_count = doc.at("node_count").get<std::size_t>();

    for (const auto& n : doc.at("nodes")) {
      HiddenNode node{n.at("w").get<std::vector<double>>(), n.at("b").get<double>()};
      if (node.w.size() != model.input_dim) throw DeserializationError(end, "node input dimension mismatch");
      model.nodes.push_back(std::move(node));
    }
    if (model.nodes.size() != node_count) throw DeserializationError(end, "node_count does not match nodes array");

    const auto& beta = doc.at("beta");
    if (beta.size() != node_count) throw DeserializationError(end, "beta row count does not match node_count");
    model.beta = Matrix(static_cast<Eigen::Index>(node_count), static_cast<Eigen::Index>(model.output_dim));
    for (std::size_t j = 0; j < node_count; ++j) {
      const auto& row = beta.at(j);
      if (row.size() != model.output_dim) throw DeserializationError(end, "beta row width does not match output_dim");
      for (std::size_t q = 0; q < model.output_dim; ++q) {
        model.beta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(q)) = row.at(q).get<double>();
      }
    }

    const auto& norm = doc.at("normalization");
    if (!norm.is_null()) {
      Normalization n{ranges_from_json(norm.at("inputs")), ranges_from_json(norm.at("outputs"))};
      if (n.inputs.size() != model.input_dim || n.outputs.size() != model.output_dim) {
        throw DeserializationError(end, "normalization ranges do not match model dimensions");
      }
      model.normalization = std::move(n);
    }
    return model;
  } catch (const json::exception& e) {
    throw DeserializationError(end, e.what());
  }
}

ScnModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace rscn
