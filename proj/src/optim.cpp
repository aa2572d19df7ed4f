#include "nvcycle/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nvcycle/errors.hpp"

namespace nvcycle {

namespace {

struct BoxTransform {
  const std::vector<double>& lo;
  const std::vector<double>& hi;

  std::vector<double> to_x(const std::vector<double>& z) const {
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double s = std::sin(z[i]);
      x[i] = lo[i] + (hi[i] - lo[i]) * s * s;
    }
    return x;
  }

  std::vector<double> to_z(const std::vector<double>& x) const {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double frac =
          std::clamp((x[i] - lo[i]) / (hi[i] - lo[i]), 0.0, 1.0);
      z[i] = std::asin(std::sqrt(frac));
    }
    return z;
  }
};

}  // namespace

NelderMeadResult nelder_mead_bounded(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0, const std::vector<double>& lower,
    const std::vector<double>& upper, const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0) throw ValidationError("optimizer needs at least one parameter");
  if (lower.size() != n || upper.size() != n)
    throw ValidationError("bound vectors must match the parameter count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] < upper[i]))
      throw ValidationError("each lower bound must be below its upper bound");
    if (x0[i] < lower[i] || x0[i] > upper[i])
      throw ValidationError("initial point must lie within the bounds");
  }

  const BoxTransform box{lower, upper};
  int evals = 0;
  const auto f_of_z = [&](const std::vector<double>& z) {
    ++evals;
    const double f = objective(box.to_x(z));
    return std::isfinite(f) ? f : 1e300;
  };

  std::vector<double> best_z = box.to_z(x0);
  double best_f = f_of_z(best_z);
  bool converged = false;

  for (int round = 0; round <= options.restarts; ++round) {
    // Simplex seeded at the incumbent.
    std::vector<std::vector<double>> simplex{best_z};
    std::vector<double> fvals{best_f};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> z = best_z;
      z[i] += options.initial_step;
      simplex.push_back(z);
      fvals.push_back(f_of_z(z));
    }

    std::vector<std::size_t> order(n + 1);
    while (evals < options.max_evals) {
      std::iota(order.begin(), order.end(), 0u);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fvals[a] < fvals[b];
      });
      const std::size_t ib = order[0], iw = order[n];
      const std::size_t is = order[n - 1];  // second worst

      double spread_f = fvals[iw] - fvals[ib];
      double spread_z = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        spread_z = std::max(spread_z,
                            std::fabs(simplex[iw][i] - simplex[ib][i]));
      if (spread_f <= options.f_tol || spread_z <= options.x_tol) {
        converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t m = 0; m <= n; ++m) {
        if (m == iw) continue;
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[m][i];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      const auto blend = [&](double t) {
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i)
          z[i] = centroid[i] + t * (centroid[i] - simplex[iw][i]);
        return z;
      };

      const std::vector<double> zr = blend(1.0);
      const double fr = f_of_z(zr);
      if (fr < fvals[ib]) {
        const std::vector<double> ze = blend(2.0);
        const double fe = f_of_z(ze);
        if (fe < fr) {
          simplex[iw] = ze;
          fvals[iw] = fe;
        } else {
          simplex[iw] = zr;
          fvals[iw] = fr;
        }
      } else if (fr < fvals[is]) {
        simplex[iw] = zr;
        fvals[iw] = fr;
      } else {
        const bool outside = fr < fvals[iw];
        const std::vector<double> zc = blend(outside ? 0.5 : -0.5);
        const double fc = f_of_z(zc);
        if (fc < std::min(fr, fvals[iw])) {
          simplex[iw] = zc;
          fvals[iw] = fc;
        } else {
          // Shrink toward the best vertex.
          for (std::size_t m = 0; m <= n; ++m) {
            if (m == ib) continue;
            for (std::size_t i = 0; i < n; ++i)
              simplex[m][i] = simplex[ib][i] +
                              0.5 * (simplex[m][i] - simplex[ib][i]);
            fvals[m] = f_of_z(simplex[m]);
          }
        }
      }
    }

    for (std::size_t m = 0; m <= n; ++m)
      if (fvals[m] < best_f) {
        best_f = fvals[m];
        best_z = simplex[m];
      }
    if (evals >= options.max_evals) {
      converged = false;
      break;
    }
  }

  return {box.to_x(best_z), best_f, converged, evals};
}

}  // namespace nvcycle
