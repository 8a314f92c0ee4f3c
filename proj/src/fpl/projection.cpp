#include "admissible/fpl/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

namespace admissible::fpl {

namespace {

/// min 0.5 |x - w0|^2 s.t. rows x <= offsets, via Lawson-Hanson on the dual
/// (lambda >= 0, x = w0 - A' lambda). Linearly dependent active rows are
/// handled with a minimum-norm solve; an inconsistent system leaves some row
/// violated, which the caller's certificate catches.
Vec dual_active_set(const Vec& w0, const Mat& a, const Vec& b, double tol) {
  const Eigen::Index m = a.rows();
  if (m == 0) return w0;
  const Mat gram = a * a.transpose();
  const Vec h = a * w0 - b;
  Vec lambda = Vec::Zero(m);
  std::vector<char> active(static_cast<std::size_t>(m), 0);
  Vec x = w0;
  const int max_outer = static_cast<int>(10 * m) + 100;
  for (int outer = 0; outer < max_outer; ++outer) {
    const Vec slack = b - a * x;
    Eigen::Index enter = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!active[static_cast<std::size_t>(i)] && slack[i] < -tol && (enter < 0 || slack[i] < slack[enter])) enter = i;
    }
    if (enter < 0) break;
    active[static_cast<std::size_t>(enter)] = 1;
    for (int inner = 0; inner <= m; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < m; ++i)
        if (active[static_cast<std::size_t>(i)]) idx.push_back(i);
      const auto p = static_cast<Eigen::Index>(idx.size());
      if (p == 0) break;
      Mat g(p, p);
      Vec rhs(p);
      for (Eigen::Index r = 0; r < p; ++r) {
        rhs[r] = h[idx[static_cast<std::size_t>(r)]];
        for (Eigen::Index c = 0; c < p; ++c) g(r, c) = gram(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
      }
      const Vec z = Eigen::CompleteOrthogonalDecomposition<Mat>(g).solve(rhs);
      if ((z.array() > 0.0).all()) {
        for (Eigen::Index r = 0; r < p; ++r) lambda[idx[static_cast<std::size_t>(r)]] = z[r];
        break;
      }
      // Step towards z until the first multiplier hits zero, then drop it.
      double alpha = 1.0;
      for (Eigen::Index r = 0; r < p; ++r) {
        const double l = lambda[idx[static_cast<std::size_t>(r)]];
        if (z[r] <= 0.0) alpha = std::min(alpha, l > 0.0 ? l / (l - z[r]) : 0.0);
      }
      for (Eigen::Index r = 0; r < p; ++r) {
        const Eigen::Index i = idx[static_cast<std::size_t>(r)];
        lambda[i] += alpha * (z[r] - lambda[i]);
        if (lambda[i] <= 1e-15 * (1.0 + std::abs(z[r]))) {
          lambda[i] = 0.0;
          active[static_cast<std::size_t>(i)] = 0;
        }
      }
    }
    x = w0 - a.transpose() * lambda;
  }
  return x;
}

/// Exact projection: halfspaces plus l1 facets s'x <= cap added while the
/// iterate lies outside the ball.
Vec exact_projection(const Vec& w0, const std::vector<Vec>& normals, const std::vector<double>& offsets, bool ball,
                     double cap, double tol) {
  const Eigen::Index k = w0.size();
  std::vector<Vec> rows = normals;
  std::vector<double> rhs = offsets;
  Vec x = w0;
  for (int cut = 0; cut <= 4 * static_cast<int>(k) + 64; ++cut) {
    Mat a(static_cast<Eigen::Index>(rows.size()), k);
    Vec b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      b[static_cast<Eigen::Index>(i)] = rhs[i];
    }
    x = dual_active_set(w0, a, b, tol);
    if (!ball || x.lpNorm<1>() <= cap + tol) return x;
    Vec s(k);
    for (Eigen::Index i = 0; i < k; ++i) s[i] = std::abs(x[i]) <= tol ? 0.0 : (x[i] > 0.0 ? 1.0 : -1.0);
    const double norm = s.norm();
    rows.push_back(s / norm);
    rhs.push_back(cap / norm);
  }
  return x;
}

}  // namespace

Vec project_l1_ball(const Vec& v, double radius) {
  if (!(radius > 0.0)) throw ConfigError("l1 radius must be positive");
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = v[i] < 0.0 ? -m : m;
  }
  return out;
}

ProjectionResult nearest_admissible_point(const Vec& w_init, const std::vector<polytope::Halfspace>& halfspaces,
                                          double norm_cap, const ProjectionOptions& options) {
  const Eigen::Index k = w_init.size();
  // Normalized a'w <= b rows; zero normals are either vacuous or infeasible.
  std::vector<Vec> normals;
  std::vector<double> offsets;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < halfspaces.size(); ++i) {
    if (halfspaces[i].normal.size() != k) throw ConfigError("halfspace dimension does not match w_init");
    const polytope::Halfspace h = halfspaces[i].as_less_equal();
    const double norm = h.normal.norm();
    if (norm == 0.0) {
      if (h.offset < 0.0) throw InfeasibleError("halfspace " + std::to_string(i) + " has a zero normal and excludes every point");
      continue;
    }
    normals.push_back(h.normal / norm);
    offsets.push_back(h.offset / norm);
    source.push_back(i);
  }
  const bool ball = norm_cap > 0.0;
  const std::size_t m = normals.size();
  const std::size_t n_sets = m + (ball ? 1 : 0);

  auto max_violation = [&](const Vec& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, normals[i].dot(x) - offsets[i]);
    if (ball) worst = std::max(worst, x.lpNorm<1>() - norm_cap);
    return worst;
  };

  ProjectionResult result;
  Vec x = w_init;
  if (n_sets == 0 || max_violation(x) <= 0.0) {
    result.point = x;
    return result;
  }
  std::vector<Vec> corrections(n_sets, Vec::Zero(k));
  for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
    const Vec start = x;
    double drift = 0.0;  // Dykstra can crawl while corrections still move.
    for (std::size_t s = 0; s < n_sets; ++s) {
      const Vec y = x + corrections[s];
      Vec p;
      if (s < m) {
        const double excess = normals[s].dot(y) - offsets[s];
        p = excess > 0.0 ? Vec(y - excess * normals[s]) : y;
      } else {
        p = project_l1_ball(y, norm_cap);
      }
      drift += (y - p - corrections[s]).squaredNorm();
      corrections[s] = y - p;
      x = std::move(p);
    }
    const double viol = max_violation(x);
    if (viol < options.tolerance && (x - start).norm() < options.tolerance &&
        std::sqrt(drift) < options.tolerance) {
      result.point = x;
      result.cycles = cycle;
      result.max_violation = std::max(viol, 0.0);
      return result;
    }
  }
  // Dykstra stalled; an exact solve either certifies or shows infeasibility.
  x = exact_projection(w_init, normals, offsets, ball, norm_cap, options.tolerance * 1e-3);
  const double viol = max_violation(x);
  if (viol < options.tolerance) {
    result.point = x;
    result.cycles = options.max_cycles;
    result.max_violation = std::max(viol, 0.0);
    result.exact_fallback = true;
    return result;
  }
  std::ostringstream msg;
  msg << "projection did not converge in " << options.max_cycles << " cycles; max violation "
      << viol << "; violated halfspaces:";
  bool any = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (normals[i].dot(x) - offsets[i] > options.tolerance) {
      msg << " #" << source[i] << " " << halfspaces[source[i]].describe();
      any = true;
    }
  }
  if (!any) msg << " none";
  if (ball && x.lpNorm<1>() - norm_cap > options.tolerance) msg << "; outside the l1 ball of radius " << norm_cap;
  if (!std::isfinite(viol)) throw NumericalError(msg.str());
  throw InfeasibleError(msg.str());
}

}  // namespace admissible::fpl
