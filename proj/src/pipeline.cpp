#include "larsen/pipeline.hpp"

#include <cmath>
#include <string>

namespace larsen {

namespace {

// Substream tags for derive_seed; members use a pair of streams each.
constexpr std::uint64_t kSelectionStream = 0;
constexpr std::uint64_t kGaStream = 1;
constexpr std::uint64_t kMemberBase = 2;

Matrix project_columns(const Matrix& x, const std::vector<int>& kept) {
  Matrix out(x.rows(), static_cast<Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.col(static_cast<Index>(k)) = x.col(kept[k]);
  }
  return out;
}

}  // namespace

void LarsenConfig::validate() const {
  if (members < 1) {
    throw ContractViolation("LarsenConfig: members must be >= 1");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ContractViolation("LarsenConfig: lambda must lie in (0, 1)");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ContractViolation("LarsenConfig: val_fraction must lie in (0, 1)");
  }
  elm.validate();
  ga.validate();
}

std::vector<Index> bag_sample(Index n_rows, Rng& rng) {
  if (n_rows < 1) {
    throw ContractViolation("bag_sample: n_rows must be >= 1");
  }
  std::vector<Index> bag(static_cast<std::size_t>(n_rows));
  for (auto& i : bag) {
    i = static_cast<Index>(rng.below(static_cast<std::size_t>(n_rows)));
  }
  return bag;
}

EnsembleModel larsen_fit(const Matrix& x, const Matrix& y, const LarsenConfig& config) {
  config.validate();
  require_finite(x, "larsen_fit: x");
  require_finite(y, "larsen_fit: y");
  if (x.rows() != y.rows()) {
    throw ContractViolation("larsen_fit: x and y row counts differ");
  }
  if (y.cols() != 1) {
    throw ContractViolation("larsen_fit: y must have exactly one column");
  }
  if (x.cols() < 1) {
    throw ContractViolation("larsen_fit: x needs at least one column");
  }

  EnsembleModel model;
  model.lars_enabled = config.lars_enabled;
  model.input_dim = x.cols();

  if (config.lars_enabled) {
    model.selection = select_variables(x, y, config.val_fraction,
                                       derive_seed(config.seed, kSelectionStream));
  } else {
    model.selection.k_star = static_cast<int>(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
      model.selection.ranked.push_back(static_cast<int>(j));
      model.selection.kept.push_back(static_cast<int>(j));
    }
  }
  if (model.selection.kept.empty()) {
    throw ContractViolation("larsen_fit: variable selection kept no columns");
  }
  const Matrix x_kept = project_columns(x, model.selection.kept);

  const Index n = x.rows();
  model.members.reserve(static_cast<std::size_t>(config.members));
  model.bags.reserve(static_cast<std::size_t>(config.members));
  for (int i = 0; i < config.members; ++i) {
    Rng bag_rng(derive_seed(config.seed, kMemberBase + 2 * static_cast<std::uint64_t>(i)));
    std::vector<Index> bag = bag_sample(n, bag_rng);

    Matrix xb(n, x_kept.cols());
    Matrix yb(n, 1);
    for (Index r = 0; r < n; ++r) {
      xb.row(r) = x_kept.row(bag[static_cast<std::size_t>(r)]);
      yb.row(r) = y.row(bag[static_cast<std::size_t>(r)]);
    }

    ElmConfig member_config = config.elm;
    member_config.seed =
        derive_seed(config.seed, kMemberBase + 2 * static_cast<std::uint64_t>(i) + 1);
    model.members.push_back(elm_train(xb, yb, member_config));
    model.bags.push_back(std::move(bag));
  }

  // The evolved weights are scored against the full training set, members
  // having seen only their own bags of it.
  GaConfig ga_config = config.ga;
  ga_config.seed = derive_seed(config.seed, kGaStream);
  model.gasen = gasen_select(model.members, x_kept, y, config.lambda, ga_config);
  return model;
}

Matrix larsen_predict(const EnsembleModel& model, const Matrix& x) {
  require_finite(x, "larsen_predict");
  if (x.cols() != model.input_dim) {
    throw ContractViolation("larsen_predict: x has " + std::to_string(x.cols()) +
                            " columns, model expects " + std::to_string(model.input_dim));
  }
  if (model.members.empty() || model.gasen.selected.empty()) {
    throw ContractViolation("larsen_predict: model has no surviving members");
  }
  const Matrix x_kept = project_columns(x, model.selection.kept);
  Matrix sum;
  for (int idx : model.gasen.selected) {
    if (idx < 0 || idx >= static_cast<int>(model.members.size())) {
      throw ContractViolation("larsen_predict: selected member index out of range");
    }
    const Matrix pred = elm_predict(model.members[static_cast<std::size_t>(idx)], x_kept);
    if (sum.size() == 0) {
      sum = pred;
    } else {
      sum += pred;
    }
  }
  return sum / static_cast<double>(model.gasen.selected.size());
}

nlohmann::json ensemble_to_json(const EnsembleModel& model) {
  nlohmann::json j;
  j["lars_enabled"] = model.lars_enabled;
  j["input_dim"] = model.input_dim;
  j["selection"] = selection_to_json(model.selection);
  nlohmann::json members = nlohmann::json::array();
  for (const ElmModel& m : model.members) {
    members.push_back(elm_to_json(m));
  }
  j["members"] = std::move(members);
  j["bags"] = model.bags;
  j["gasen"]["selected"] = model.gasen.selected;
  j["gasen"]["weights"] = std::vector<double>(
      model.gasen.weights.data(), model.gasen.weights.data() + model.gasen.weights.size());
  j["gasen"]["trace"] = model.gasen.ga_trace;
  return j;
}

EnsembleModel ensemble_from_json(const nlohmann::json& j) {
  EnsembleModel model;
  model.lars_enabled = j.at("lars_enabled").get<bool>();
  model.input_dim = j.at("input_dim").get<Index>();
  model.selection = selection_from_json(j.at("selection"));
  for (const auto& mj : j.at("members")) {
    model.members.push_back(elm_from_json(mj));
  }
  model.bags = j.at("bags").get<std::vector<std::vector<Index>>>();
  model.gasen.selected = j.at("gasen").at("selected").get<std::vector<int>>();
  const auto weights = j.at("gasen").at("weights").get<std::vector<double>>();
  model.gasen.weights = Eigen::Map<const Vector>(weights.data(),
                                                 static_cast<Index>(weights.size()));
  model.gasen.ga_trace = j.at("gasen").at("trace").get<std::vector<double>>();
  return model;
}

}  // namespace larsen
