#pragma once

#include <variant>

#include "robincone/geometry.hpp"

namespace robincone {

enum class ArtificialBC { Dirichlet, Neumann };

struct NoPerturbation {};

/// Circular-arc fillet of radius `radius` replacing the vertex (latitude or sector cones).
struct SmoothedVertex {
  double radius;
};

/// Aperture change θ(r) = θ + amplitude·β((r − center)/width) with the bump
/// β(x) = exp(1 − 1/(1 − x²)) on (−1, 1), so the support is [center − width, center + width].
struct RadialBump {
  double amplitude;
  double center;
  double width;

  double offset(double r) const;
};

using Perturbation = std::variant<NoPerturbation, SmoothedVertex, RadialBump>;

struct DomainSpec {
  ConeSpec cone;
  Perturbation perturbation = NoPerturbation{};
  double truncation_radius = 10.0;
  ArtificialBC artificial_bc = ArtificialBC::Dirichlet;
  double alpha = 1.0;

  bool perturbed() const { return !std::holds_alternative<NoPerturbation>(perturbation); }
  /// Largest radius touched by the perturbation (0 for none).
  double perturbation_extent() const;

  /// Throws InvalidDomain when a parameter is out of range or the perturbation reaches R_T − 1.
  void validate() const;

  /// The domain scaled by `factor` about the vertex (α is left untouched).
  DomainSpec dilated(double factor) const;

  DomainSpec with_bc(ArtificialBC bc) const {
    DomainSpec copy = *this;
    copy.artificial_bc = bc;
    return copy;
  }
};

std::string to_string(ArtificialBC bc);

}  // namespace robincone
