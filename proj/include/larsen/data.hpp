#pragma once

#include "larsen/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace larsen {

// A named regression dataset.  noise_mask marks columns that were injected by
// blend_noise rather than measured; it lets experiment reports tell original
// variables from planted distractors.
struct Dataset {
  std::string name;
  Matrix x;  // rows x input_dim
  Matrix y;  // rows x 1
  std::vector<std::string> column_labels;
  std::string target_label = "target";
  std::vector<bool> noise_mask;
};

// Zero-mean Gaussian distractor columns to mix into a dataset.  One column per
// sigma; `seed` drives both the draws and the column shuffle.
struct NoiseProfile {
  std::vector<double> sigmas;
  std::uint64_t seed = 0;
};

// The two standard distractor sets used by the benchmark experiments.
std::vector<double> seven_sigmas();
std::vector<double> ten_sigmas();

// Strict numeric CSV reader: first line is the header, one column is the
// target, everything else becomes x in file order.  Ragged rows, non-numeric
// cells and unknown target names raise ContractViolation with the position.
Dataset load_csv(const std::string& path, const std::string& target_column);

// Writes header plus rows with enough digits to round-trip doubles exactly.
void save_csv(const Dataset& ds, const std::string& path);

// Shuffled split: n_train rows into the first dataset, the rest into the
// second.  Deterministic in `seed`.
std::pair<Dataset, Dataset> split(const Dataset& ds, Index n_train, std::uint64_t seed);

// Order-preserving split at a row boundary, no shuffle.
std::pair<Dataset, Dataset> split_at(const Dataset& ds, Index n_train);

struct StandardizeStats {
  Vector mean;
  Vector sd;  // as applied; 1.0 where a column was flagged constant
  std::vector<bool> zero_variance;
};

struct StandardizedPair {
  Dataset train;
  Dataset test;
  StandardizeStats stats;
};

// Centers and scales every x column to zero mean and unit sample sd, with the
// statistics estimated on `train` only and applied to both splits.  Constant
// columns are centered but not scaled, and flagged.  y is left untouched.
StandardizedPair standardize(const Dataset& train, const Dataset& test);

// Appends one Gaussian column per sigma, then shuffles the column order so the
// distractors are not trivially identifiable by position.  Labels record the
// sigma, noise_mask records the provenance.
Dataset blend_noise(const Dataset& ds, const NoiseProfile& profile);

// The synthetic benchmark: y = sin(u) + sin(2u) on an even grid of n points
// over [lo, hi], plus any distractor columns from the profile.
Dataset gen_two_sines(Index n, double lo, double hi, const NoiseProfile& profile);

// Shape, labels and distractor positions of a dataset, for report files.
nlohmann::json dataset_manifest(const Dataset& ds);

}  // namespace larsen
