#include "fastlight/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fastlight/error.hpp"

namespace fastlight {

double DetuningDistribution::max_abs_node() const {
  double m = 0.0;
  for (double d : nodes) m = std::max(m, std::abs(d));
  return m;
}

void DetuningDistribution::validate() const {
  if (nodes.empty() || nodes.size() != weights.size())
    throw ValidationError("detuning distribution: node and weight counts must match and be non-zero");
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i]) || !(weights[i] >= 0.0))
      throw ValidationError("detuning distribution: non-finite node or negative weight");
    const std::size_t mirror = nodes.size() - 1 - i;
    if (std::abs(nodes[i] + nodes[mirror]) > 1e-12 * (1.0 + std::abs(nodes[i])) ||
        weights[i] != weights[mirror])
      throw ValidationError("detuning distribution: nodes must be symmetric about zero");
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError("detuning distribution: weights must sum to 1 (got " + std::to_string(sum) + ")");
}

namespace {

// Force exact +/- pairing and unit total weight on a sorted rule.
void symmetrize(DetuningDistribution& d) {
  const std::size_t n = d.nodes.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (d.nodes[j] - d.nodes[i]);
    const double w = 0.5 * (d.weights[i] + d.weights[j]);
    d.nodes[i] = -x;
    d.nodes[j] = x;
    d.weights[i] = d.weights[j] = w;
  }
  if (n % 2 == 1) d.nodes[n / 2] = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += d.weights[i];
  for (double& w : d.weights) w /= sum;
}

}  // namespace

DetuningDistribution gaussian_detuning_quadrature(double t2_star, int n_nodes) {
  if (!(t2_star > 0.0)) throw ValidationError("T2* must be > 0");
  if (n_nodes < 2 || n_nodes % 2 != 0)
    throw ValidationError("detuning node count must be even and >= 2 (got " + std::to_string(n_nodes) + ")");

  // Jacobi matrix of the probabilists' Hermite polynomials: zero diagonal,
  // off-diagonal sqrt(k).
  const int n = n_nodes;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigen-solve failed");

  DetuningDistribution d;
  d.nodes.resize(n);
  d.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    d.nodes[i] = solver.eigenvalues()(i) / t2_star;
    const double v0 = solver.eigenvectors()(0, i);
    d.weights[i] = v0 * v0;
  }
  symmetrize(d);
  return d;
}

DetuningDistribution banded_detuning_quadrature(double t2_star, double core_half_width,
                                                double spacing) {
  if (!(t2_star > 0.0)) throw ValidationError("T2* must be > 0");
  if (!(spacing > 0.0) || !(core_half_width >= spacing))
    throw ValidationError("banded quadrature needs 0 < spacing <= core_half_width");

  const double sigma = 1.0 / t2_star;
  const auto density = [&](double delta) {
    return t2_star / std::sqrt(2.0 * std::numbers::pi) *
           std::exp(-0.5 * (t2_star * delta) * (t2_star * delta));
  };

  const auto per_side = static_cast<std::size_t>(std::ceil(core_half_width / spacing));
  const double edge = static_cast<double>(per_side) * spacing;

  std::vector<double> pos_nodes;
  std::vector<double> pos_weights;
  double core_mass = 0.0;
  for (std::size_t j = 0; j < per_side; ++j) {
    const double delta = (static_cast<double>(j) + 0.5) * spacing;
    pos_nodes.push_back(delta);
    pos_weights.push_back(density(delta) * spacing);
    core_mass += 2.0 * pos_weights.back();
  }

  // One-sided gaussian tail beyond the core edge: mass and rms position.
  const double z = edge / sigma;
  const double tail_mass = 0.5 * std::erfc(z / std::numbers::sqrt2);
  if (tail_mass > 1e-15) {
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    const double rms = sigma * std::sqrt(1.0 + z * pdf / tail_mass);
    pos_nodes.push_back(rms);
    // Whatever the midpoint core misses goes to the tail node.
    pos_weights.push_back(std::max(0.0, 0.5 * (1.0 - core_mass)));
  }

  DetuningDistribution d;
  for (std::size_t j = pos_nodes.size(); j-- > 0;) {
    d.nodes.push_back(-pos_nodes[j]);
    d.weights.push_back(pos_weights[j]);
  }
  for (std::size_t j = 0; j < pos_nodes.size(); ++j) {
    d.nodes.push_back(pos_nodes[j]);
    d.weights.push_back(pos_weights[j]);
  }
  symmetrize(d);
  return d;
}

DetuningDistribution resonant_detuning() {
  return DetuningDistribution{{0.0}, {1.0}};
}

}  // namespace fastlight
