#include "larsen/elm.hpp"

#include "larsen/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace larsen {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kTanh:
      return "tanh";
    case Activation::kHardLimit:
      return "hardlimit";
  }
  throw ContractViolation("to_string: unknown activation");
}

Activation activation_from_string(const std::string& name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "hardlimit") return Activation::kHardLimit;
  throw ContractViolation("unknown activation '" + name +
                          "' (expected sigmoid, tanh or hardlimit)");
}

void ElmConfig::validate() const {
  if (hidden_count < 1) {
    throw ContractViolation("ElmConfig: hidden_count must be >= 1");
  }
  if (!(input_weight_min < input_weight_max)) {
    throw ContractViolation("ElmConfig: empty input weight range");
  }
  if (!(bias_min < bias_max)) {
    throw ContractViolation("ElmConfig: empty bias range");
  }
  if (!std::isfinite(input_weight_min) || !std::isfinite(input_weight_max) ||
      !std::isfinite(bias_min) || !std::isfinite(bias_max)) {
    throw ContractViolation("ElmConfig: ranges must be finite");
  }
}

namespace {

double activate(Activation a, double v) {
  switch (a) {
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-v));
    case Activation::kTanh:
      return std::tanh(v);
    case Activation::kHardLimit:
      return v >= 0.0 ? 1.0 : 0.0;
  }
  throw ContractViolation("activate: unknown activation");
}

}  // namespace

Matrix elm_hidden_matrix(const ElmModel& model, const Matrix& x) {
  require_finite(x, "elm_hidden_matrix");
  if (x.cols() != model.input_dim) {
    throw ContractViolation("elm_hidden_matrix: x has " + std::to_string(x.cols()) +
                            " columns, model expects " + std::to_string(model.input_dim));
  }
  Matrix h = x * model.input_weights.transpose();  // n x hidden
  h.rowwise() += model.biases.transpose();
  for (Index j = 0; j < h.rows(); ++j) {
    for (Index i = 0; i < h.cols(); ++i) {
      h(j, i) = activate(model.activation, h(j, i));
    }
  }
  return h;
}

ElmModel elm_train(const Matrix& x, const Matrix& t, const ElmConfig& config) {
  config.validate();
  require_finite(x, "elm_train: x");
  require_finite(t, "elm_train: t");
  if (x.rows() < 1) {
    throw ContractViolation("elm_train: no training rows");
  }
  if (x.rows() != t.rows()) {
    throw ContractViolation("elm_train: x has " + std::to_string(x.rows()) +
                            " rows but t has " + std::to_string(t.rows()));
  }
  if (x.cols() < 1 || t.cols() < 1) {
    throw ContractViolation("elm_train: x and t need at least one column");
  }

  ElmModel model;
  model.activation = config.activation;
  model.input_dim = x.cols();
  model.output_dim = t.cols();
  model.seed = config.seed;

  // Draw order is fixed: all input weights row by row, then all biases.
  Rng rng(config.seed);
  model.input_weights.resize(config.hidden_count, x.cols());
  for (Index i = 0; i < model.input_weights.rows(); ++i) {
    for (Index d = 0; d < model.input_weights.cols(); ++d) {
      model.input_weights(i, d) = rng.uniform(config.input_weight_min, config.input_weight_max);
    }
  }
  model.biases.resize(config.hidden_count);
  for (Index i = 0; i < model.biases.size(); ++i) {
    model.biases(i) = rng.uniform(config.bias_min, config.bias_max);
  }

  const Matrix h = elm_hidden_matrix(model, x);
  model.output_weights = lstsq(h, t);
  return model;
}

Matrix elm_predict(const ElmModel& model, const Matrix& x) {
  if (model.output_weights.rows() != model.input_weights.rows()) {
    throw ContractViolation("elm_predict: model has no trained output weights");
  }
  return elm_hidden_matrix(model, x) * model.output_weights;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) {
    throw ContractViolation(what + ": expected an array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (!row.is_array()) {
      throw ContractViolation(what + ": row " + std::to_string(i) + " is not an array");
    }
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw ContractViolation(what + ": ragged rows");
    }
    for (Index k = 0; k < cols; ++k) {
      m(i, k) = row.at(k).get<double>();
    }
  }
  if (rows == 0) {
    m.resize(0, 0);
  }
  require_finite(m, what);
  return m;
}

}  // namespace

nlohmann::json elm_to_json(const ElmModel& model) {
  nlohmann::json j;
  j["activation"] = to_string(model.activation);
  j["input_dim"] = model.input_dim;
  j["output_dim"] = model.output_dim;
  j["seed"] = model.seed;
  j["input_weights"] = matrix_to_json(model.input_weights);
  j["biases"] = matrix_to_json(model.biases);
  j["output_weights"] = matrix_to_json(model.output_weights);
  return j;
}

ElmModel elm_from_json(const nlohmann::json& j) {
  ElmModel model;
  model.activation = activation_from_string(j.at("activation").get<std::string>());
  model.input_dim = j.at("input_dim").get<Index>();
  model.output_dim = j.at("output_dim").get<Index>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.input_weights = matrix_from_json(j.at("input_weights"), "elm_from_json: input_weights");
  const Matrix biases = matrix_from_json(j.at("biases"), "elm_from_json: biases");
  if (biases.cols() != 1) {
    throw ContractViolation("elm_from_json: biases must be a column");
  }
  model.biases = biases.col(0);
  model.output_weights =
      matrix_from_json(j.at("output_weights"), "elm_from_json: output_weights");
  if (model.input_weights.cols() != model.input_dim ||
      model.output_weights.cols() != model.output_dim ||
      model.input_weights.rows() != model.output_weights.rows() ||
      model.biases.size() != model.input_weights.rows()) {
    throw ContractViolation("elm_from_json: inconsistent shapes");
  }
  return model;
}

}  // namespace larsen
