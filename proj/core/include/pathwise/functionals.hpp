#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathwise/linalg.hpp"
#include "pathwise/paths.hpp"

namespace pathwise {

/// Declared analytic properties. Nothing here is verified beyond the spot
/// checks in spot_check_regularity.
struct RegularityTags {
  bool left_continuous = false;
  bool right_continuous = false;
  bool jointly_continuous = false;
  bool boundedness_preserving = false;
  /// Horizontally once and vertically twice differentiable.
  bool smooth = false;
};

using ScalarFn = std::function<double(const StoppedPath&)>;
using GradientFn = std::function<Vector(const StoppedPath&)>;
using HessianFn = std::function<Matrix(const StoppedPath&)>;

/// Non-anticipative functional F(t, ω_t). It only ever sees a StoppedPath,
/// so it cannot read the path after the stop time. Missing derivatives are
/// approximated by finite differences when allowed.
struct Functional {
  std::string name;
  std::size_t dim = 1;
  ScalarFn eval;
  GradientFn vertical_gradient;
  HessianFn vertical_hessian;
  ScalarFn horizontal;
  RegularityTags regularity;

  double operator()(const StoppedPath& sp) const { return eval(sp); }
};

struct DerivativeOptions {
  bool allow_fd = true;
  /// Vertical bump per coordinate: rel * (1 + |ω_i(t)|).
  double vertical_bump_rel = 1e-4;
  /// Horizontal step; default min(1e-4, (T - t)/2).
  std::optional<double> horizontal_step;
  /// Two-step extrapolation of the one-sided horizontal difference.
  bool richardson = false;
};

/// Central differences [F(ω_t + h e_i) - F(ω_t - h e_i)] / 2h.
Vector vertical_derivative_fd(const Functional& f, const StoppedPath& sp, double h);
/// Per-coordinate bumps h_i = rel * (1 + |ω_i(t)|).
Vector vertical_derivative_fd(const Functional& f, const StoppedPath& sp,
                              const DerivativeOptions& options = {});
/// Central second differences; the result is symmetric by construction.
Matrix vertical_hessian_fd(const Functional& f, const StoppedPath& sp,
                           const DerivativeOptions& options = {});
/// Forward difference [F(t + h, ω_t) - F(t, ω_t)] / h on the frozen path.
/// Throws std::out_of_range at t = T or when t + h > T.
double horizontal_derivative_fd(const Functional& f, const StoppedPath& sp, double h,
                                bool richardson = false);
double horizontal_derivative_fd(const Functional& f, const StoppedPath& sp,
                                const DerivativeOptions& options = {});

/// Analytic derivative when present, else finite differences, else
/// CapabilityError.
Vector gradient(const Functional& f, const StoppedPath& sp, const DerivativeOptions& options = {});
Matrix hessian(const Functional& f, const StoppedPath& sp, const DerivativeOptions& options = {});
double horizontal(const Functional& f, const StoppedPath& sp,
                  const DerivativeOptions& options = {});
bool has_gradient(const Functional& f, const DerivativeOptions& options);

/// Matrix-valued A(t, x(t)), e.g. a quadratic-variation density.
struct DensitySpec {
  std::string name;
  std::function<Matrix(double, std::span<const double>)> at;

  Matrix operator()(double t, std::span<const double> x) const { return at(t, x); }

  static DensitySpec constant(Matrix a);
  /// diag(σ² x_i²)
  static DensitySpec geometric(double sigma, std::size_t dim = 1);
};

/// DF + ½ tr(A ∇²F) at sp. Requires t < T.
double fpde_residual(const Functional& f, const DensitySpec& a, const StoppedPath& sp,
                     const DerivativeOptions& options = {});

/// f: R^d -> R with optional analytic derivatives, for cylinder functionals
/// F(t, ω) = f(ω(t)) and for the classical pathwise Itô formula.
struct CylinderFunction {
  std::string name;
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> f;
  std::function<Vector(std::span<const double>)> grad;
  std::function<Matrix(std::span<const double>)> hess;
};

/// "identity", "square", "cube", "exp" (d = 1); "product" (x1*x2, d = 2);
/// "sum_squares" (any d).
CylinderFunction named_cylinder(const std::string& name, std::size_t dim = 1);

Functional identity_functional(std::size_t dim = 1, std::size_t coordinate = 0);
Functional cylinder_functional(const CylinderFunction& f);
/// ∫_0^t ω_c(s) ds
Functional running_integral_functional(std::size_t dim = 1, std::size_t coordinate = 0);
/// ∫_0^t ω_c(s) ds + ω_c(t)(T - t)
Functional asian_forward_functional(double maturity, std::size_t dim = 1,
                                    std::size_t coordinate = 0);

enum class OptionType { call, put };

/// Zero-rate Black–Scholes price of a vanilla option on ω(t) with time to
/// maturity T - t. DF is the calendar-time derivative (the negative of the
/// usual time-to-maturity theta).
Functional black_scholes_functional(double sigma, double strike, double maturity,
                                    OptionType type = OptionType::call);

struct BlackScholesValues {
  double price = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  /// d price / d t at fixed spot
  double time_derivative = 0.0;
};
BlackScholesValues black_scholes(double spot, double strike, double sigma, double tau,
                                 OptionType type);

/// Descriptor used by configuration files.
struct FunctionalSpec {
  std::string name;
  std::size_t dim = 1;
  std::size_t coordinate = 0;
  std::string cylinder;
  double sigma = 0.0;
  double strike = 0.0;
  double maturity = 1.0;
  OptionType option = OptionType::call;
};

/// Builds one of "identity", "cylinder", "running_integral",
/// "asian_forward", "black_scholes". Unknown names and invalid parameters
/// throw std::invalid_argument.
Functional builtin(const FunctionalSpec& spec);

using Payoff = std::function<double(const SampledPath&)>;
Payoff vanilla_payoff(double strike, OptionType type, std::size_t coordinate = 0);
/// ∫_0^T ω_c(s) ds under the library's quadrature convention.
Payoff average_payoff(std::size_t coordinate = 0);

struct RegularityCheck {
  /// max over samples of |F(ω_t^δ) - F(ω_t)| / |δ|
  double vertical_sensitivity = 0.0;
  /// max over samples of |F(t + h, ω_t) - F(t, ω_t)| / h
  double horizontal_sensitivity = 0.0;
  /// max over sampled grid times of |F(t, ω_t) - F(t, ω_{t-})| at continuity points
  double left_right_gap = 0.0;
  std::size_t samples = 0;
};

/// Evaluates F on d_∞-nearby stopped paths at the given times. A declared
/// continuity tag is plausible when the sensitivities stay bounded as the
/// perturbation shrinks; this only samples, it proves nothing.
RegularityCheck spot_check_regularity(const Functional& f, const SampledPath& path,
                                      std::span<const double> times, double perturbation = 1e-6);

}  // namespace pathwise
