#include "doctest.h"

#include "larsen/mrsr.hpp"
#include "larsen/numerics.hpp"

#include <algorithm>
#include <cmath>

using namespace larsen;

namespace {

Matrix random_matrix(Rng& rng, Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(lo, hi);
    }
  }
  return m;
}

// Re-create the standardized design the path worked on.
Matrix standardized_inputs(const LarsPath& path, const Matrix& x) {
  Matrix xs = x.rowwise() - path.x_mean.transpose();
  for (Index j = 0; j < xs.cols(); ++j) {
    xs.col(j) /= path.x_scale(j);
  }
  for (int j : path.excluded) {
    xs.col(j).setZero();
  }
  return xs;
}

}  // namespace

TEST_CASE("cumulative correlation equals the explicit double loop") {
  Rng rng(1);
  const Matrix residual = random_matrix(rng, 15, 3);
  const Matrix x = random_matrix(rng, 15, 6);
  const Vector c = cumulative_correlation(residual, x);
  REQUIRE(c.size() == 6);
  for (Index j = 0; j < 6; ++j) {
    double expect = 0.0;
    for (Index k = 0; k < 3; ++k) {
      expect += std::abs(residual.col(k).dot(x.col(j)));
    }
    CHECK(c(j) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cumulative_correlation(random_matrix(rng, 4, 1), x), ContractViolation);
}

TEST_CASE("step size matches a dense scan of the crossing point, one target") {
  // c_j(gamma) = |a_j - gamma b_j| against the active (1 - gamma) c_max.
  const double c_max = 1.0;
  Matrix a(1, 3);
  a << 0.3, -0.7, 0.5;
  Matrix b(1, 3);
  b << 1.4, -0.2, 0.9;
  const std::vector<int> inactive = {0, 1, 2};
  const StepSize st = lars_step_size(c_max, a, b, inactive);

  const double grid = 1e-6;
  double scan = 1.0;
  int scan_j = -1;
  for (int j = 0; j < 3; ++j) {
    for (double g = 0.0; g <= 1.0; g += grid) {
      if (std::abs(a(0, j) - g * b(0, j)) >= (1.0 - g) * c_max - 1e-12) {
        if (g < scan) {
          scan = g;
          scan_j = j;
        }
        break;
      }
    }
  }
  REQUIRE(scan_j >= 0);
  CHECK(st.gamma == doctest::Approx(scan).epsilon(1e-4));
  REQUIRE(st.entering.size() == 1);
  CHECK(st.entering[0] == scan_j);
}

TEST_CASE("step size matches a dense scan with two targets") {
  const double c_max = 2.0;
  Rng rng(6);
  const Matrix a = random_matrix(rng, 2, 4, -0.9, 0.9);
  const Matrix b = random_matrix(rng, 2, 4, -1.5, 1.5);
  const std::vector<int> inactive = {0, 1, 2, 3};
  const StepSize st = lars_step_size(c_max, a, b, inactive);

  const double grid = 1e-6;
  double scan = 1.0;
  for (int j = 0; j < 4; ++j) {
    for (double g = 0.0; g <= 1.0; g += grid) {
      const double lhs = std::abs(a(0, j) - g * b(0, j)) + std::abs(a(1, j) - g * b(1, j));
      if (lhs >= (1.0 - g) * c_max - 1e-12) {
        scan = std::min(scan, g);
        break;
      }
    }
  }
  CHECK(st.gamma == doctest::Approx(scan).epsilon(1e-4));
}

TEST_CASE("step size with nothing inactive says gamma one") {
  const StepSize st = lars_step_size(1.0, Matrix::Zero(1, 2), Matrix::Zero(1, 2), {});
  CHECK(st.gamma == 1.0);
  CHECK(st.entering.empty());
}

TEST_CASE("the strongest regressor enters first") {
  // Orthogonalized columns with equal scales; t loads 3 on column 1, 1 on
  // column 0, nothing on column 2.
  Rng rng(13);
  const Index n = 60;
  Matrix raw = random_matrix(rng, n, 3);
  raw = raw.rowwise() - raw.colwise().mean();
  Matrix q = raw;
  for (Index j = 0; j < 3; ++j) {
    for (Index k = 0; k < j; ++k) {
      q.col(j) -= q.col(k).dot(q.col(j)) / q.col(k).squaredNorm() * q.col(k);
    }
  }
  for (Index j = 0; j < 3; ++j) {
    q.col(j) *= std::sqrt(static_cast<double>(n - 1)) / q.col(j).norm();
  }
  const Matrix t = q.col(0) + 3.0 * q.col(1);

  const LarsPath path = mrsr_path(q, t);
  REQUIRE(!path.entry_order.empty());
  CHECK(path.entry_order[0] == 1);
  CHECK(path.entry_order[1] == 0);
  REQUIRE(path.entry_order.size() == 3);
  CHECK(path.entry_order[2] == 2);
}

TEST_CASE("a single regressor finishes in one full step") {
  Rng rng(19);
  const Matrix x = random_matrix(rng, 30, 1);
  Matrix t(30, 1);
  for (Index i = 0; i < 30; ++i) {
    t(i, 0) = 2.5 * x(i, 0) + 0.01 * rng.gaussian(0.0, 1.0);
  }
  const LarsPath path = mrsr_path(x, t);
  REQUIRE(path.steps.size() == 1);
  CHECK(path.steps[0].gamma == 1.0);
  const Matrix xs = standardized_inputs(path, x);
  const Matrix ts = t.rowwise() - path.t_mean.transpose();
  CHECK((path.steps.back().weights - lstsq(xs, ts)).norm() < 1e-10);
}

TEST_CASE("path properties hold on random instances") {
  const std::vector<std::tuple<Index, Index, Index, std::uint64_t>> cases = {
      {20, 2, 1, 100}, {35, 5, 1, 101}, {50, 7, 2, 102}, {80, 10, 3, 103},
      {25, 4, 2, 104}, {100, 6, 1, 105}, {40, 8, 3, 106},
  };
  for (const auto& [n, m, p, seed] : cases) {
    CAPTURE(seed);
    Rng rng(seed);
    const Matrix x = random_matrix(rng, n, m);
    const Matrix w = random_matrix(rng, m, p, -2.0, 2.0);
    Matrix t = x * w;
    for (Index i = 0; i < t.rows(); ++i) {
      for (Index j = 0; j < t.cols(); ++j) {
        t(i, j) += 0.1 * rng.gaussian(0.0, 1.0);
      }
    }

    const LarsPath path = mrsr_path(x, t);
    const Matrix xs = standardized_inputs(path, x);
    const Matrix ts = t.rowwise() - path.t_mean.transpose();

    // Entry order is a permutation of the usable columns.
    std::vector<int> order = path.entry_order;
    std::sort(order.begin(), order.end());
    CHECK(static_cast<Index>(order.size()) == m);
    CHECK(std::adjacent_find(order.begin(), order.end()) == order.end());

    std::size_t prev_active = 0;
    for (const LarsStep& step : path.steps) {
      CHECK(step.gamma >= 0.0);
      CHECK(step.gamma <= 1.0);
      CHECK(step.active.size() > prev_active);
      prev_active = step.active.size();

      // Never-entered regressors keep exactly zero weight rows.
      std::vector<bool> in_active(m, false);
      for (int j : step.active) {
        in_active[static_cast<std::size_t>(j)] = true;
      }
      for (Index j = 0; j < m; ++j) {
        if (!in_active[static_cast<std::size_t>(j)]) {
          CHECK(step.weights.row(j).norm() == 0.0);
        }
      }

      // Equal cumulative correlation across the active set after the update.
      const Matrix residual = ts - xs * step.weights;
      const Vector c = cumulative_correlation(residual, xs);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int j : step.active) {
        lo = std::min(lo, c(j));
        hi = std::max(hi, c(j));
      }
      CHECK(hi - lo <= 1e-8 * std::max(1.0, step.c_max));
    }

    CHECK(path.steps.back().gamma == 1.0);
    const Matrix ols = lstsq(xs, ts);
    CHECK((path.steps.back().weights - ols).norm() <= 1e-6 * std::max(1.0, ols.norm()));
  }
}

TEST_CASE("column permutation permutes the entry order") {
  Rng rng(500);
  const Index n = 40;
  const Index m = 5;
  const Matrix x = random_matrix(rng, n, m);
  const Matrix w = random_matrix(rng, m, 1, -2.0, 2.0);
  Matrix t = x * w;
  for (Index i = 0; i < n; ++i) {
    t(i, 0) += 0.05 * rng.gaussian(0.0, 1.0);
  }
  const LarsPath base = mrsr_path(x, t);

  const std::vector<int> perm = {3, 0, 4, 1, 2};  // x_perm.col(j) = x.col(perm[j])
  Matrix xp(n, m);
  for (Index j = 0; j < m; ++j) {
    xp.col(j) = x.col(perm[static_cast<std::size_t>(j)]);
  }
  const LarsPath permuted = mrsr_path(xp, t);
  REQUIRE(permuted.entry_order.size() == base.entry_order.size());
  for (std::size_t k = 0; k < base.entry_order.size(); ++k) {
    CHECK(perm[static_cast<std::size_t>(permuted.entry_order[k])] == base.entry_order[k]);
  }
}

TEST_CASE("constant columns are excluded and reported") {
  Rng rng(321);
  Matrix x = random_matrix(rng, 30, 4);
  x.col(2).setConstant(3.7);
  Matrix t(30, 1);
  for (Index i = 0; i < 30; ++i) {
    t(i, 0) = x(i, 0) - x(i, 3);
  }
  const LarsPath path = mrsr_path(x, t);
  REQUIRE(path.excluded == std::vector<int>{2});
  for (int j : path.entry_order) {
    CHECK(j != 2);
  }
  for (const LarsStep& step : path.steps) {
    CHECK(step.weights.row(2).norm() == 0.0);
  }
  CHECK(path.x_scale(2) == 1.0);
}

TEST_CASE("select_variables keeps the true support of an exact linear target") {
  Rng rng(777);
  const Index n = 500;
  const Index m = 5;
  Matrix x(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      x(i, j) = rng.gaussian(0.0, 1.0);
    }
  }
  Matrix t(n, 1);
  for (Index i = 0; i < n; ++i) {
    t(i, 0) = 2.0 * x(i, 1) + 1.0 * x(i, 3);
  }
  const VariableSelection sel = select_variables(x, t, 0.25, 42);
  CHECK(sel.k_star <= 3);
  CHECK(std::find(sel.kept.begin(), sel.kept.end(), 1) != sel.kept.end());
  CHECK(std::find(sel.kept.begin(), sel.kept.end(), 3) != sel.kept.end());
  REQUIRE(sel.k_values.size() == sel.val_mse.size());
  CHECK(sel.val_mse[0] >= 0.0);
}

TEST_CASE("select_variables output is coherent and deterministic") {
  Rng rng(888);
  const Index n = 80;
  const Matrix x = random_matrix(rng, n, 6);
  Matrix t(n, 1);
  for (Index i = 0; i < n; ++i) {
    t(i, 0) = x(i, 0) + 0.5 * x(i, 2) + 0.1 * rng.gaussian(0.0, 1.0);
  }
  const VariableSelection a = select_variables(x, t, 0.3, 7);
  const VariableSelection b = select_variables(x, t, 0.3, 7);
  CHECK(a.ranked == b.ranked);
  CHECK(a.kept == b.kept);
  CHECK(a.k_star == b.k_star);
  CHECK(a.val_mse == b.val_mse);

  CHECK(a.k_star >= 1);
  CHECK(a.kept.size() == static_cast<std::size_t>(a.k_star));
  std::vector<int> prefix(a.ranked.begin(), a.ranked.begin() + a.k_star);
  std::sort(prefix.begin(), prefix.end());
  CHECK(a.kept == prefix);

  const VariableSelection c = select_variables(x, t, 0.3, 8);
  CHECK((a.ranked != c.ranked || a.val_mse != c.val_mse));

  const nlohmann::json j = selection_to_json(a);
  const VariableSelection back = selection_from_json(j);
  CHECK(back.ranked == a.ranked);
  CHECK(back.kept == a.kept);
  CHECK(back.k_star == a.k_star);
  CHECK(back.val_mse == a.val_mse);
  CHECK(back.excluded == a.excluded);
}

TEST_CASE("mrsr rejects malformed input") {
  Matrix x(10, 2);
  x.setRandom();
  Matrix t(9, 1);
  t.setRandom();
  CHECK_THROWS_AS(mrsr_path(x, t), ContractViolation);
  Matrix one_row = Matrix::Ones(1, 2);
  CHECK_THROWS_AS(mrsr_path(one_row, Matrix::Ones(1, 1)), ContractViolation);
  Matrix t10(10, 1);
  t10.setRandom();
  CHECK_THROWS_AS(select_variables(x, t10, 0.0, 1), ContractViolation);
  CHECK_THROWS_AS(select_variables(x, t10, 1.0, 1), ContractViolation);
  Matrix constant = Matrix::Ones(20, 3);
  Matrix tc = Matrix::Ones(20, 1);
  CHECK_THROWS_AS(select_variables(constant, tc, 0.25, 1), ContractViolation);
}
