#pragma once

#include <cstddef>
#include <vector>

namespace fastlight {

/// Discrete stand-in for the gaussian inhomogeneous line shape
///   F(delta) = (T2*/sqrt(2 pi)) exp(-(T2* delta)^2 / 2).
/// Nodes are detunings in ns^-1, weights are dimensionless and sum to one.
/// Nodes come in (+delta, -delta) pairs: nodes[i] == -nodes[n - 1 - i].
struct DetuningDistribution {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double max_abs_node() const;

  /// Weighted sum  sum_i w_i f(delta_i).
  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }

  /// Throws ValidationError unless the pairing/normalisation invariants hold.
  void validate() const;
};

inline constexpr int kDefaultDetuningNodes = 48;

/// Gauss-Hermite rule for the gaussian line, computed by Golub-Welsch on the
/// probabilists' Hermite Jacobi matrix. Exact for polynomials of degree
/// 2n - 1. Requires n >= 2 and even.
DetuningDistribution gaussian_detuning_quadrature(double t2_star, int n_nodes = kDefaultDetuningNodes);

/// Uniform midpoint rule on [-core_half_width, core_half_width] with weights
/// F(delta) * spacing, plus one lumped node per side carrying the remaining
/// tail mass at the tail's rms detuning.
///
/// Meant for T2* << tau, where Gauss-Hermite nodes are spaced much wider than
/// the pulse bandwidth and the discrete lines would rephase within the window.
/// The core must cover the pulse spectrum; atoms beyond it only need the right
/// total weight.
DetuningDistribution banded_detuning_quadrature(double t2_star, double core_half_width,
                                                double spacing);

/// Single resonant node with unit weight (homogeneous line, T2* -> infinity).
DetuningDistribution resonant_detuning();

}  // namespace fastlight
