#pragma once

#include "larsen/elm.hpp"
#include "larsen/gasen.hpp"
#include "larsen/mrsr.hpp"
#include "larsen/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <vector>

namespace larsen {

struct LarsenConfig {
  int members = 20;
  double lambda = 0.05;        // survival threshold on normalized weights
  bool lars_enabled = true;    // rank-and-filter inputs before training
  double val_fraction = 0.25;  // holdout share inside the variable selection
  ElmConfig elm;
  GaConfig ga;
  std::uint64_t seed = 0;  // master seed; member, bag, selection and GA
                           // streams are all derived from it

  void validate() const;
};

// One bootstrap bag: n_rows draws with replacement from [0, n_rows).
std::vector<Index> bag_sample(Index n_rows, Rng& rng);

// Selective ensemble over a filtered input space.  `selection.kept` maps the
// member input columns back to the columns of the training matrix;
// `gasen.selected` lists the members that survived weight pruning.
struct EnsembleModel {
  bool lars_enabled = true;
  Index input_dim = 0;  // columns the model expects at predict time
  VariableSelection selection;
  std::vector<ElmModel> members;
  std::vector<std::vector<Index>> bags;
  GasenResult gasen;
};

// Full training pass: filter inputs (optional), train one private-bag network
// per member, evolve ensemble weights on the whole training set, keep the
// members above the weight threshold.
EnsembleModel larsen_fit(const Matrix& x, const Matrix& y, const LarsenConfig& config);

// Unweighted average of the surviving members' predictions.
Matrix larsen_predict(const EnsembleModel& model, const Matrix& x);

nlohmann::json ensemble_to_json(const EnsembleModel& model);
EnsembleModel ensemble_from_json(const nlohmann::json& j);

}  // namespace larsen
