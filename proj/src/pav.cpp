#include "monoshrink/pav.hpp"

#include <algorithm>
#include <sstream>

namespace monoshrink {

PoolingReport check_pooling_condition(const ObjectiveFamily& family, const Eigen::VectorXd& grid) {
  const Eigen::Index m = family.minimizers.size();
  if (m == 0) throw InvalidArgument("pooling check: empty family");
  if (!family.objective) throw InvalidArgument("pooling check: missing objective");
  if (grid.size() == 0) throw InvalidArgument("pooling check: empty grid");

  PoolingReport report;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double pooled = family.minimizers.segment(i, j - i + 1).mean();

      std::vector<double> points(grid.data(), grid.data() + grid.size());
      points.push_back(pooled);
      std::sort(points.begin(), points.end());
      points.erase(std::unique(points.begin(), points.end()), points.end());

      auto total = [&](double t) {
        double s = 0.0;
        for (Eigen::Index k = i; k <= j; ++k) s += family.objective(k, t);
        if (!std::isfinite(s)) {
          std::ostringstream msg;
          msg << "pooling check: non-finite objective on range [" << i << ", " << j
              << "] at " << t;
          throw InvalidArgument(msg.str());
        }
        return s;
      };

      double prev_t = points.front();
      double prev_f = total(prev_t);
      for (std::size_t k = 1; k < points.size(); ++k) {
        const double t = points[k];
        const double f = total(t);
        const bool left = t <= pooled;
        const bool right = prev_t >= pooled;
        const bool ok = (left && f < prev_f) || (right && f > prev_f) || (!left && !right);
        if (!ok) {
          report.holds = false;
          report.range_start = i;
          report.range_end = j;
          report.at = t;
          std::ostringstream msg;
          msg << "sum over [" << i << ", " << j << "] is not "
              << (left ? "decreasing" : "increasing") << " at " << t << " (pooled mean "
              << pooled << ")";
          report.detail = msg.str();
          return report;
        }
        prev_t = t;
        prev_f = f;
      }
    }
  }
  return report;
}

ObjectiveFamily gaussian_mean_family(const Eigen::VectorXd& y) {
  return {[y](Eigen::Index i, double t) {
            const double d = y[i] - t;
            return d * d;
          },
          y};
}

}  // namespace monoshrink
