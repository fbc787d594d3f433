#pragma once

// Named basis families with analytic derivatives.
//
//   poly-trig-10      {1, x, x^2, x^3, sin x, sin 5x, sin 8x, sin 9x, sin 10x, sin 12x}
//   fourier-21        {1} + {sin(2 l pi x), cos(2 l pi x)}, l = 1..10 (interleaved)
//   quad-monomial-3d  {1, x1, x2, x3, x1^2, x2^2, x3^2, x1 x2, x2 x3, x1 x3}

#include "hjr/core.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hjr {

class BasisSet {
public:
  virtual ~BasisSet() = default;

  virtual std::string_view name() const = 0;
  virtual Index n() const = 0;
  virtual int arity() const = 0;
  /// Whether d1/d2 exist (univariate families only).
  virtual bool has_derivatives() const { return false; }

  virtual Vector eval(std::span<const double> x) const = 0;
  virtual Vector d1(double x) const;
  virtual Vector d2(double x) const;

  /// Human-readable label per column.
  virtual std::vector<std::string> labels() const = 0;
};

const BasisSet& basis(std::string_view name);
std::vector<std::string_view> basis_names();

/// [phi_1(x), ..., phi_n(x)]; throws DimensionError on arity mismatch.
Vector feature_row(const BasisSet& b, std::span<const double> x);
Vector feature_row(const BasisSet& b, double x);

/// Entry k is d_coeff * phi_k''(x) + kappa * phi_k(x).
Vector residual_row(const BasisSet& b, double x, double d_coeff, double kappa);

} // namespace hjr
