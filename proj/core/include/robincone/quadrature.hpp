#pragma once

#include <vector>

namespace robincone {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` points on [-1, 1]. Rules are cached per order.
const QuadratureRule& gauss_legendre(int order);

/// Gauss-Legendre rule mapped onto [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

/// Composite rule: `order` points on each panel [breaks[i], breaks[i+1]].
QuadratureRule composite_gauss_legendre(const std::vector<double>& breaks, int order);

/// Uniform panel breakpoints covering [a, b] with panels no longer than `max_panel`.
std::vector<double> uniform_breaks(double a, double b, double max_panel);

}  // namespace robincone
