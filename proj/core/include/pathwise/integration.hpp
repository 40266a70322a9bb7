#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pathwise/convergence.hpp"
#include "pathwise/functionals.hpp"
#include "pathwise/partitions.hpp"
#include "pathwise/paths.hpp"
#include "pathwise/quadvar.hpp"

namespace pathwise {

enum class IntegrandKind { functional_gradient, cylinder_gradient, generic_left_evaluated };

/// How the holdings at a partition point t^n_i see the path.
///   continuous: ∇F(t^n_i, x^n_{t^n_i-})
///   cadlag:     ∇F(t^n_i, x^n_{t^n_i-} shifted vertically by Δx(t^n_i))
/// At t^n_0 = 0 both use the constant path x(0).
enum class PathMode { continuous, cadlag };

struct IntegrationOptions {
  ConvergenceOptions convergence;
  /// Empty means default_probe_times(path).
  std::vector<double> probe_times;
  int first_level = 0;
  DerivativeOptions derivatives;
};

struct IntegralReport {
  IntegrandKind kind = IntegrandKind::functional_gradient;
  std::vector<int> levels;
  std::vector<double> probe_times;
  /// per_level[k][p] = S^{levels[k]}(probe_times[p])
  std::vector<std::vector<double>> per_level;
  std::vector<double> limit;
  ConvergenceAssessment convergence;
  bool refined = false;

  bool converged() const { return convergence.converged; }
};

/// Holdings φ^n_i, one d-vector per cell of level n. The partition must
/// already contain the path's jump times at that level.
std::vector<Vector> vertical_form_holdings(const Functional& f, const SampledPath& path,
                                           const PartitionSequence& seq, int level, PathMode mode,
                                           const DerivativeOptions& options = {});

/// S(t) = Σ_i φ_i · (x(t_{i+1} ∧ t) - x(t_i ∧ t)) for each t in `times`.
std::vector<double> riemann_sums(std::span<const Vector> holdings, std::span<const double> level,
                                 const SampledPath& path, std::span<const double> times);

/// Föllmer integral ∫∇F d^Π x with the jump-perturbed argument. Jump times
/// missing from the partition are added first. CapabilityError when F has no
/// gradient and finite differences are disabled.
IntegralReport follmer_integral_functional(const Functional& f, const SampledPath& path,
                                           const PartitionSequence& seq,
                                           const IntegrationOptions& options = {});

using GradientField = std::function<Vector(std::span<const double>)>;

/// Classical form Σ f'(x(t_i)) · (x(t_{i+1} ∧ t) - x(t_i ∧ t)).
IntegralReport follmer_integral_cylinder(const GradientField& f_prime, const SampledPath& path,
                                         const PartitionSequence& seq,
                                         const IntegrationOptions& options = {});

/// Any non-anticipative integrand: it sees the path stopped at t^n_i only.
using AdaptedIntegrand = std::function<Vector(const StoppedPath&)>;

/// Σ φ(x_{t_i}) · (x(t_{i+1} ∧ t) - x(t_i ∧ t)) with φ evaluated at the left
/// point of each cell.
IntegralReport follmer_integral_adapted(const AdaptedIntegrand& phi, const SampledPath& path,
                                        const PartitionSequence& seq,
                                        const IntegrationOptions& options = {});

struct ItoOptions {
  IntegrationOptions integration;
  /// Level of the Föllmer sum; -1 means the top level.
  int level = -1;
};

/// F(T) - F(0) = ∫∇F d^Π x + ∫DF dt + ½∫tr(∇²F d[x]^c) + jump terms, each
/// piece reported separately. The time and second-order integrals run over
/// the finest grid; the Föllmer sum runs on `level`.
struct ItoResidualReport {
  double lhs = 0.0;
  double follmer = 0.0;
  double time_integral = 0.0;
  double second_order = 0.0;
  double jump_sum = 0.0;
  double residual = 0.0;
  int level = 0;
  bool qv_converged = false;
  double qv_metric = 0.0;
};

ItoResidualReport ito_residual_functional(const Functional& f, const SampledPath& path,
                                          const PartitionSequence& seq,
                                          const ItoOptions& options = {});
ItoResidualReport ito_residual_cylinder(const CylinderFunction& f, const SampledPath& path,
                                        const PartitionSequence& seq,
                                        const ItoOptions& options = {});

/// φ with derivative and antiderivative, for the Left Cauchy chain rule.
struct ChainRuleFunction {
  std::function<double(double)> phi;
  std::function<double(double)> phi_prime;
  std::function<double(double)> antiderivative;
};

struct LeftCauchyReport {
  std::vector<Interval> intervals;
  std::vector<int> levels;
  /// values[k][j] = S_LC over level levels[k] refined to interval j
  std::vector<std::vector<double>> values;
  std::vector<double> limit;
  ConvergenceAssessment convergence;
  /// Chain-rule residual per interval when an antiderivative is supplied.
  std::vector<double> chain_rule_residuals;
};

/// Left Cauchy sums Σ φ(g(t_i))(g(t_{i+1}) - g(t_i)) over {u} ∪ (λ_n ∩ (u,v)) ∪ {v}.
/// Requires a nested sequence and a scalar path.
LeftCauchyReport left_cauchy_integral(const ChainRuleFunction& phi, const SampledPath& g,
                                      const PartitionSequence& seq,
                                      std::span<const Interval> intervals,
                                      const ConvergenceOptions& options = {});

}  // namespace pathwise
