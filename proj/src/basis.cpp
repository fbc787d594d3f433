#include "hjr/basis.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace hjr {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class PolyTrig10 final : public BasisSet {
public:
  std::string_view name() const override { return "poly-trig-10"; }
  Index n() const override { return 10; }
  int arity() const override { return 1; }
  bool has_derivatives() const override { return true; }

  Vector eval(std::span<const double> xs) const override {
    const double x = xs[0];
    Vector v(10);
    v << 1.0, x, x * x, x * x * x, std::sin(x), 0, 0, 0, 0, 0;
    for (int k = 0; k < 5; ++k) v(5 + k) = std::sin(kFreq[k] * x);
    return v;
  }

  Vector d1(double x) const override {
    Vector v(10);
    v << 0.0, 1.0, 2.0 * x, 3.0 * x * x, std::cos(x), 0, 0, 0, 0, 0;
    for (int k = 0; k < 5; ++k) v(5 + k) = kFreq[k] * std::cos(kFreq[k] * x);
    return v;
  }

  Vector d2(double x) const override {
    Vector v(10);
    v << 0.0, 0.0, 2.0, 6.0 * x, -std::sin(x), 0, 0, 0, 0, 0;
    for (int k = 0; k < 5; ++k) v(5 + k) = -kFreq[k] * kFreq[k] * std::sin(kFreq[k] * x);
    return v;
  }

  std::vector<std::string> labels() const override {
    return {"1", "x", "x^2", "x^3", "sin(x)", "sin(5x)", "sin(8x)", "sin(9x)", "sin(10x)", "sin(12x)"};
  }

private:
  static constexpr std::array<double, 5> kFreq{5.0, 8.0, 9.0, 10.0, 12.0};
};

// Column order: 1, sin(2 pi x), cos(2 pi x), sin(4 pi x), cos(4 pi x), ...
class Fourier21 final : public BasisSet {
public:
  std::string_view name() const override { return "fourier-21"; }
  Index n() const override { return 21; }
  int arity() const override { return 1; }
  bool has_derivatives() const override { return true; }

  Vector eval(std::span<const double> xs) const override {
    const double x = xs[0];
    Vector v(21);
    v(0) = 1.0;
    for (int l = 1; l <= 10; ++l) {
      const double w = kTwoPi * l;
      v(2 * l - 1) = std::sin(w * x);
      v(2 * l) = std::cos(w * x);
    }
    return v;
  }

  Vector d1(double x) const override {
    Vector v(21);
    v(0) = 0.0;
    for (int l = 1; l <= 10; ++l) {
      const double w = kTwoPi * l;
      v(2 * l - 1) = w * std::cos(w * x);
      v(2 * l) = -w * std::sin(w * x);
    }
    return v;
  }

  Vector d2(double x) const override {
    Vector v(21);
    v(0) = 0.0;
    for (int l = 1; l <= 10; ++l) {
      const double w = kTwoPi * l;
      v(2 * l - 1) = -w * w * std::sin(w * x);
      v(2 * l) = -w * w * std::cos(w * x);
    }
    return v;
  }

  std::vector<std::string> labels() const override {
    std::vector<std::string> out{"1"};
    for (int l = 1; l <= 10; ++l) {
      out.push_back("sin(" + std::to_string(2 * l) + "pi x)");
      out.push_back("cos(" + std::to_string(2 * l) + "pi x)");
    }
    return out;
  }
};

class QuadMonomial3d final : public BasisSet {
public:
  std::string_view name() const override { return "quad-monomial-3d"; }
  Index n() const override { return 10; }
  int arity() const override { return 3; }

  Vector eval(std::span<const double> x) const override {
    Vector v(10);
    v << 1.0, x[0], x[1], x[2], x[0] * x[0], x[1] * x[1], x[2] * x[2], x[0] * x[1], x[1] * x[2], x[0] * x[2];
    return v;
  }

  std::vector<std::string> labels() const override {
    return {"1", "x1", "x2", "x3", "x1^2", "x2^2", "x3^2", "x1x2", "x2x3", "x1x3"};
  }
};

} // namespace

Vector BasisSet::d1(double) const {
  throw InvalidArgument("basis " + std::string(name()) + " has no analytic first derivative");
}

Vector BasisSet::d2(double) const {
  throw InvalidArgument("basis " + std::string(name()) + " has no analytic second derivative");
}

const BasisSet& basis(std::string_view name) {
  static const PolyTrig10 poly;
  static const Fourier21 fourier;
  static const QuadMonomial3d quad;
  for (const BasisSet* b : std::initializer_list<const BasisSet*>{&poly, &fourier, &quad}) {
    if (b->name() == name) return *b;
  }
  throw InvalidArgument("unknown basis '" + std::string(name) +
                        "' (expected poly-trig-10, fourier-21 or quad-monomial-3d)");
}

std::vector<std::string_view> basis_names() { return {"poly-trig-10", "fourier-21", "quad-monomial-3d"}; }

Vector feature_row(const BasisSet& b, std::span<const double> x) {
  if (static_cast<int>(x.size()) != b.arity()) {
    throw DimensionError("basis " + std::string(b.name()) + " takes " + std::to_string(b.arity()) +
                         " inputs, got " + std::to_string(x.size()));
  }
  return b.eval(x);
}

Vector feature_row(const BasisSet& b, double x) { return feature_row(b, std::span<const double>(&x, 1)); }

Vector residual_row(const BasisSet& b, double x, double d_coeff, double kappa) {
  if (!b.has_derivatives()) {
    throw InvalidArgument("basis " + std::string(b.name()) + " has no second derivative for residual rows");
  }
  return d_coeff * b.d2(x) + kappa * feature_row(b, x);
}

} // namespace hjr
