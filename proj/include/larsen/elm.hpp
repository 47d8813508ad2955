#pragma once

#include "larsen/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>

namespace larsen {

enum class Activation { kSigmoid, kTanh, kHardLimit };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct ElmConfig {
  int hidden_count = 50;
  Activation activation = Activation::kSigmoid;
  double input_weight_min = -1.0;
  double input_weight_max = 1.0;
  double bias_min = 0.0;
  double bias_max = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// A trained single-hidden-layer feedforward network.  Hidden parameters are
// random draws fixed at training time; only output_weights are fitted.
struct ElmModel {
  Matrix input_weights;   // hidden_count x input_dim
  Vector biases;          // hidden_count
  Matrix output_weights;  // hidden_count x output_dim
  Activation activation = Activation::kSigmoid;
  Index input_dim = 0;
  Index output_dim = 0;
  std::uint64_t seed = 0;
};

// Hidden-layer output matrix: row j, column i holds
// g(input_weights.row(i) . x.row(j) + biases(i)).
Matrix elm_hidden_matrix(const ElmModel& model, const Matrix& x);

// Draws hidden weights/biases from the config ranges, then solves for the
// output weights with the minimum-norm least squares fit of the hidden
// activations onto t.  Deterministic for a fixed config.
ElmModel elm_train(const Matrix& x, const Matrix& t, const ElmConfig& config);

Matrix elm_predict(const ElmModel& model, const Matrix& x);

nlohmann::json elm_to_json(const ElmModel& model);
ElmModel elm_from_json(const nlohmann::json& j);

}  // namespace larsen
