#ifndef MONOSHRINK_PAV_HPP
#define MONOSHRINK_PAV_HPP

// Weighted Pool-Adjacent-Violators for non-increasing (antitonic) fits.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "monoshrink/error.hpp"

namespace monoshrink {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Elementwise minimizers with positive weights.
template <typename Scalar>
struct WeightedSequence {
  Vec<Scalar> values;
  Vec<Scalar> weights;

  static WeightedSequence unit(Vec<Scalar> values) {
    WeightedSequence seq;
    seq.weights = Vec<Scalar>::Ones(values.size());
    seq.values = std::move(values);
    return seq;
  }

  void validate() const {
    if (values.size() == 0) throw InvalidArgument("pav: empty sequence");
    if (weights.size() != values.size())
      throw InvalidArgument("pav: values and weights differ in length");
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]))
        throw InvalidArgument("pav: non-finite value at index " + std::to_string(i));
      if (!std::isfinite(weights[i]) || !(weights[i] > Scalar(0)))
        throw InvalidArgument("pav: weight must be positive and finite at index " +
                              std::to_string(i));
    }
  }
};

/// Contiguous index range [start, end] (0-based, inclusive) sharing one fitted value.
template <typename Scalar>
struct Block {
  Eigen::Index start = 0;
  Eigen::Index end = 0;
  Scalar value = 0;

  Eigen::Index size() const { return end - start + 1; }
};

/// Output of pav_decreasing. Block values are strictly decreasing.
template <typename Scalar>
struct BlockPartition {
  std::vector<Block<Scalar>> blocks;
  Vec<Scalar> fitted;
};

/// Solves min sum w_i (v_i - t_i)^2 subject to t_1 >= t_2 >= ... >= t_m.
///
/// Stack-based sweep: each new element is pushed as a singleton block and
/// merged into its left neighbour while the neighbour's mean does not exceed
/// its own. Linear in m. Adjacent blocks with exactly equal means are merged
/// during the sweep, so the returned partition is the maximal-run one.
template <typename Scalar>
BlockPartition<Scalar> pav_decreasing(const WeightedSequence<Scalar>& seq) {
  seq.validate();

  struct Pool {
    Eigen::Index start;
    Eigen::Index end;
    Scalar weight;
    Scalar weighted_sum;
    Scalar mean() const { return weighted_sum / weight; }
  };

  const Eigen::Index m = seq.values.size();
  std::vector<Pool> stack;
  stack.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar w = seq.weights[i];
    stack.push_back({i, i, w, w * seq.values[i]});
    while (stack.size() > 1) {
      Pool& top = stack.back();
      Pool& prev = stack[stack.size() - 2];
      if (prev.mean() > top.mean()) break;
      prev.end = top.end;
      prev.weight += top.weight;
      prev.weighted_sum += top.weighted_sum;
      stack.pop_back();
    }
  }

  BlockPartition<Scalar> out;
  out.fitted.resize(m);
  out.blocks.reserve(stack.size());
  for (const Pool& p : stack) {
    const Scalar v = p.mean();
    out.blocks.push_back({p.start, p.end, v});
    out.fitted.segment(p.start, p.end - p.start + 1).setConstant(v);
  }
  return out;
}

/// Unit-weight overload.
template <typename Derived>
BlockPartition<typename Derived::Scalar> pav_decreasing(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  return pav_decreasing(WeightedSequence<Scalar>::unit(Vec<Scalar>(values)));
}

// ---------------------------------------------------------------------------
// Pooling-condition checks (used to certify that mean-pooling PAV is exact for
// a given per-index objective family).

/// Per-index objectives f_i together with their elementwise minimizers.
struct ObjectiveFamily {
  std::function<double(Eigen::Index, double)> objective;
  Eigen::VectorXd minimizers;
};

struct PoolingReport {
  bool holds = true;
  /// First offending index range and grid point; meaningful only when !holds.
  Eigen::Index range_start = 0;
  Eigen::Index range_end = 0;
  double at = 0.0;
  std::string detail;

  explicit operator bool() const { return holds; }
};

/// For every index range i..j, checks on the grid (plus the pooled mean
/// itself) that sum_{k=i..j} f_k is strictly decreasing left of the pooled
/// mean of the minimizers and strictly increasing right of it.
PoolingReport check_pooling_condition(const ObjectiveFamily& family, const Eigen::VectorXd& grid);

/// f_i(t) = (y_i - t)^2.
ObjectiveFamily gaussian_mean_family(const Eigen::VectorXd& y);

}  // namespace monoshrink

#endif  // MONOSHRINK_PAV_HPP
