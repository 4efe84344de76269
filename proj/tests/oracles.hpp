#pragma once

// Independent reference implementations used as test oracles.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "vigg/compat_graph.hpp"
#include "vigg/geometry.hpp"

namespace vigg::oracle {

/// Horn's closed-form absolute orientation with unit quaternions.
inline RigidTransform horn_fit(std::span<const Correspondence> cs) {
  double w_total = 0.0;
  Point3 cs_mean = Point3::Zero(), cd_mean = Point3::Zero();
  for (const auto& c : cs) {
    w_total += c.weight;
    cs_mean += c.weight * c.src;
    cd_mean += c.weight * c.dst;
  }
  cs_mean /= w_total;
  cd_mean /= w_total;
  double s[3][3] = {};
  for (const auto& c : cs) {
    const Point3 a = c.src - cs_mean, b = c.dst - cd_mean;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s[i][j] += c.weight * a[i] * b[j];
  }
  const double sxx = s[0][0], sxy = s[0][1], sxz = s[0][2];
  const double syx = s[1][0], syy = s[1][1], syz = s[1][2];
  const double szx = s[2][0], szy = s[2][1], szz = s[2][2];
  Eigen::Matrix4d n;
  n << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
       syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
       szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
       sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(n);
  const Eigen::Vector4d q = solver.eigenvectors().col(3);
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Matrix3 r;
  r << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  // Re-orthonormalize away round-off so the transform constructor accepts it.
  Eigen::JacobiSVD<Matrix3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r = svd.matrixU() * svd.matrixV().transpose();
  return {r, cd_mean - r * cs_mean};
}

/// Relative rotation angle in degrees through unit quaternions.
inline double quaternion_angle_deg(const Matrix3& a, const Matrix3& b) {
  const Eigen::Quaterniond qa(a), qb(b);
  const Eigen::Quaterniond d = qa.conjugate() * qb;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w())) * 180.0 / std::numbers::pi;
}

/// Maximal cliques of at least min_size nodes by exhaustive subset search, in
/// canonical order. Requires g.size() <= 20.
inline std::vector<Clique> brute_force_cliques(const CompatGraph& g, std::size_t min_size) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g.adjacent(i, j)) adj[i] |= 1u << j;

  std::vector<Clique> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool clique = true;
    std::uint32_t common = (1u << n) - 1;
    for (std::size_t i = 0; i < n && clique; ++i) {
      if (!(mask >> i & 1u)) continue;
      if ((mask & ~(1u << i) & ~adj[i]) != 0) clique = false;
      common &= adj[i];
    }
    if (!clique || (common & ~mask) != 0) continue;  // not a clique, or extendable
    Clique c;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask >> i & 1u) c.push_back(i);
    if (c.size() >= min_size) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Clique& a, const Clique& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  return out;
}

/// P(chi2(3) <= x) by composite Simpson integration of the density, after
/// the substitution t = s^2 that removes the square-root singularity at 0.
inline double chi2_3_cdf(double x, int intervals = 20000) {
  const double b = std::sqrt(x);
  const double h = b / intervals;
  auto f = [](double s) { return 2.0 * s * s * std::exp(-0.5 * s * s) / std::sqrt(2.0 * std::numbers::pi); };
  double sum = f(0.0) + f(b);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

}  // namespace vigg::oracle
