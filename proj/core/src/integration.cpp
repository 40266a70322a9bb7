#include "pathwise/integration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathwise/errors.hpp"

namespace pathwise {

namespace {

PartitionSequence covering(const SampledPath& path, const PartitionSequence& seq, bool& refined) {
  if (seq.horizon() != path.horizon())
    throw std::invalid_argument("partition horizon differs from path horizon");
  const auto jt = path.jump_times();
  refined = !seq.covers(jt);
  return refined ? seq.refine_with(jt) : seq;
}

std::vector<int> levels_from(const PartitionSequence& seq, int first_level) {
  const int first = std::max(0, first_level);
  if (seq.top_level() - first < 1)
    throw std::invalid_argument("a partition-limit report needs at least two levels");
  std::vector<int> out;
  for (int n = first; n <= seq.top_level(); ++n) out.push_back(n);
  return out;
}

std::vector<double> probes_or_default(const SampledPath& path, const std::vector<double>& given) {
  auto probes = given.empty() ? default_probe_times(path) : given;
  for (double t : probes)
    if (!(t >= 0.0 && t <= path.horizon())) throw std::out_of_range("probe time outside [0, T]");
  return probes;
}

/// x^T A x
double quadratic_form(const Matrix& a, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) s += x[i] * a(i, j) * x[j];
  return s;
}

/// ½ Σ_j tr(H_j ([x]^c(t_{j+1}) - [x]^c(t_j))) over the finest grid, with
/// the continuous increment Δx_j Δx_jᵀ - J_{j+1} J_{j+1}ᵀ.
template <class HessianAt>
double second_order_term(const SampledPath& path, HessianAt hessian_at) {
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    const Vector dx = subtract(path.value(j + 1), path.value(j));
    const Matrix h = hessian_at(j);
    double term = quadratic_form(h, dx);
    if (path.has_jump(j + 1)) term -= quadratic_form(h, path.jump(j + 1));
    total += 0.5 * term;
  }
  return total;
}

void attach_qv_caveat(const SampledPath& path, const PartitionSequence& seq,
                      const IntegrationOptions& options, ItoResidualReport& r) {
  QVOptions qo;
  qo.convergence = options.convergence;
  qo.probe_times = options.probe_times;
  qo.first_level = options.first_level;
  if (path.dim() == 1) {
    const auto q = qv_along(path, seq, qo);
    r.qv_converged = q.converged();
    r.qv_metric = q.convergence_metric();
  } else {
    const auto q = qv_matrix(path, seq, qo);
    r.qv_converged = q.convergence.converged;
    r.qv_metric = q.convergence.metric;
  }
}

}  // namespace

std::vector<Vector> vertical_form_holdings(const Functional& f, const SampledPath& path,
                                           const PartitionSequence& seq, int level, PathMode mode,
                                           const DerivativeOptions& options) {
  if (!has_gradient(f, options))
    throw CapabilityError("functional '" + f.name + "' has no vertical gradient");
  if (mode == PathMode::continuous && !path.jumps().empty())
    throw PreconditionViolation("continuous-path holdings requested for a path with jumps");
  const auto grid = seq.level(level);
  const SampledPath xn = stepwise_approximation(path, seq, level);
  std::vector<Vector> holdings;
  holdings.reserve(grid.size() - 1);
  holdings.push_back(gradient(f, stop(path, 0.0, Side::right), options));
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    StoppedPath sp = stop(xn, grid[i], Side::left);
    if (mode == PathMode::cadlag) {
      const std::size_t idx = path.index_of(grid[i]);
      if (idx < path.size() && path.has_jump(idx)) sp = sp.perturbed(path.jump(idx));
    }
    holdings.push_back(gradient(f, sp, options));
  }
  return holdings;
}

std::vector<double> riemann_sums(std::span<const Vector> holdings, std::span<const double> level,
                                 const SampledPath& path, std::span<const double> times) {
  if (holdings.size() + 1 != level.size())
    throw std::invalid_argument("one holding per partition cell is required");
  const std::size_t m = holdings.size();
  std::vector<Vector> x(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) x[i] = path.value_at(level[i]);
  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    prefix[i + 1] = prefix[i] + dot(holdings[i], subtract(x[i + 1], x[i]));

  std::vector<double> out(times.size());
  for (std::size_t p = 0; p < times.size(); ++p) {
    const double t = times[p];
    const auto it = std::upper_bound(level.begin(), level.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - level.begin()) - 1;
    if (k >= m) {
      out[p] = prefix[m];
    } else {
      out[p] = prefix[k] + dot(holdings[k], subtract(path.value_at(t), x[k]));
    }
  }
  return out;
}

IntegralReport follmer_integral_functional(const Functional& f, const SampledPath& path,
                                           const PartitionSequence& seq,
                                           const IntegrationOptions& options) {
  IntegralReport r;
  r.kind = IntegrandKind::functional_gradient;
  const PartitionSequence used = covering(path, seq, r.refined);
  r.levels = levels_from(used, options.first_level);
  r.probe_times = probes_or_default(path, options.probe_times);
  for (int n : r.levels) {
    const auto holdings =
        vertical_form_holdings(f, path, used, n, PathMode::cadlag, options.derivatives);
    r.per_level.push_back(riemann_sums(holdings, used.level(n), path, r.probe_times));
  }
  r.limit = r.per_level.back();
  r.convergence = assess_convergence(r.per_level, options.convergence);
  return r;
}

IntegralReport follmer_integral_cylinder(const GradientField& f_prime, const SampledPath& path,
                                         const PartitionSequence& seq,
                                         const IntegrationOptions& options) {
  if (!f_prime) throw CapabilityError("cylinder integrand without a gradient");
  IntegralReport r;
  r.kind = IntegrandKind::cylinder_gradient;
  const PartitionSequence used = covering(path, seq, r.refined);
  r.levels = levels_from(used, options.first_level);
  r.probe_times = probes_or_default(path, options.probe_times);
  for (int n : r.levels) {
    const auto level = used.level(n);
    std::vector<Vector> holdings;
    holdings.reserve(level.size() - 1);
    for (std::size_t i = 0; i + 1 < level.size(); ++i) holdings.push_back(f_prime(path.value_at(level[i])));
    r.per_level.push_back(riemann_sums(holdings, level, path, r.probe_times));
  }
  r.limit = r.per_level.back();
  r.convergence = assess_convergence(r.per_level, options.convergence);
  return r;
}

IntegralReport follmer_integral_adapted(const AdaptedIntegrand& phi, const SampledPath& path,
                                        const PartitionSequence& seq,
                                        const IntegrationOptions& options) {
  if (!phi) throw std::invalid_argument("adapted integral needs an integrand");
  IntegralReport r;
  r.kind = IntegrandKind::generic_left_evaluated;
  const PartitionSequence used = covering(path, seq, r.refined);
  r.levels = levels_from(used, options.first_level);
  r.probe_times = probes_or_default(path, options.probe_times);
  for (int n : r.levels) {
    const auto level = used.level(n);
    std::vector<Vector> holdings;
    holdings.reserve(level.size() - 1);
    for (std::size_t i = 0; i + 1 < level.size(); ++i) {
      Vector h = phi(stop(path, level[i], Side::right));
      if (h.size() != path.dim()) throw std::invalid_argument("integrand dimension mismatch");
      holdings.push_back(std::move(h));
    }
    r.per_level.push_back(riemann_sums(holdings, level, path, r.probe_times));
  }
  r.limit = r.per_level.back();
  r.convergence = assess_convergence(r.per_level, options.convergence);
  return r;
}

ItoResidualReport ito_residual_functional(const Functional& f, const SampledPath& path,
                                          const PartitionSequence& seq, const ItoOptions& options) {
  bool refined = false;
  const PartitionSequence used = covering(path, seq, refined);
  const auto& dopt = options.integration.derivatives;
  ItoResidualReport r;
  r.level = options.level < 0 ? used.top_level() : options.level;
  used.level(r.level);

  const double horizon = path.horizon();
  r.lhs = f.eval(stop(path, horizon, Side::right)) - f.eval(stop(path, 0.0, Side::right));

  const auto holdings = vertical_form_holdings(f, path, used, r.level, PathMode::cadlag, dopt);
  const double end[] = {horizon};
  r.follmer = riemann_sums(holdings, used.level(r.level), path, end)[0];

  for (std::size_t j = 0; j + 1 < path.size(); ++j)
    r.time_integral +=
        horizontal(f, stop(path, path.time(j), Side::left), dopt) * (path.time(j + 1) - path.time(j));

  r.second_order = second_order_term(
      path, [&](std::size_t j) { return hessian(f, stop(path, path.time(j), Side::right), dopt); });

  for (std::size_t j : path.jump_indices()) {
    const double t = path.time(j);
    const StoppedPath before = stop(path, t, Side::left);
    r.jump_sum += f.eval(stop(path, t, Side::right)) - f.eval(before) -
                  dot(gradient(f, before, dopt), path.jump(j));
  }

  r.residual = std::abs(r.lhs - (r.follmer + r.time_integral + r.second_order + r.jump_sum));
  attach_qv_caveat(path, used, options.integration, r);
  return r;
}

ItoResidualReport ito_residual_cylinder(const CylinderFunction& f, const SampledPath& path,
                                        const PartitionSequence& seq, const ItoOptions& options) {
  if (!f.f || !f.grad || !f.hess)
    throw CapabilityError("cylinder function '" + f.name + "' needs f, gradient and Hessian");
  if (f.dim != path.dim()) throw std::invalid_argument("cylinder function dimension mismatch");
  bool refined = false;
  const PartitionSequence used = covering(path, seq, refined);
  ItoResidualReport r;
  r.level = options.level < 0 ? used.top_level() : options.level;
  const auto level = used.level(r.level);

  r.lhs = f.f(path.value(path.size() - 1)) - f.f(path.value(0));

  std::vector<Vector> holdings;
  holdings.reserve(level.size() - 1);
  for (std::size_t i = 0; i + 1 < level.size(); ++i) holdings.push_back(f.grad(path.value_at(level[i])));
  const double end[] = {path.horizon()};
  r.follmer = riemann_sums(holdings, level, path, end)[0];

  r.second_order = second_order_term(path, [&](std::size_t j) { return f.hess(path.value(j)); });

  for (std::size_t j : path.jump_indices()) {
    const Vector before = path.left_limit(j);
    r.jump_sum += f.f(path.value(j)) - f.f(before) - dot(f.grad(before), path.jump(j));
  }

  r.residual = std::abs(r.lhs - (r.follmer + r.second_order + r.jump_sum));
  attach_qv_caveat(path, used, options.integration, r);
  return r;
}

LeftCauchyReport left_cauchy_integral(const ChainRuleFunction& phi, const SampledPath& g,
                                      const PartitionSequence& seq,
                                      std::span<const Interval> intervals,
                                      const ConvergenceOptions& options) {
  if (g.dim() != 1) throw std::invalid_argument("Left Cauchy integral needs a scalar path");
  if (!seq.nested()) throw std::invalid_argument("Left Cauchy integral needs nested partitions");
  if (!phi.phi) throw std::invalid_argument("Left Cauchy integral needs an integrand");
  if (intervals.empty()) throw std::invalid_argument("Left Cauchy integral needs intervals");
  bool refined = false;
  const PartitionSequence used = covering(g, seq, refined);
  LeftCauchyReport r;
  r.intervals.assign(intervals.begin(), intervals.end());
  for (const auto& iv : r.intervals)
    if (!(0.0 <= iv.start && iv.start < iv.end && iv.end <= g.horizon()))
      throw std::invalid_argument("Left Cauchy interval must satisfy 0 <= u < v <= T");
  r.levels = levels_from(used, 0);

  auto x = [&](double t) { return g.value_at(t)[0]; };
  auto lc_sum = [&](std::span<const double> level, const Interval& iv) {
    double a = x(iv.start);
    double s = 0.0;
    auto it = std::upper_bound(level.begin(), level.end(), iv.start);
    for (; it != level.end() && *it < iv.end; ++it) {
      const double b = x(*it);
      s += phi.phi(a) * (b - a);
      a = b;
    }
    return s + phi.phi(a) * (x(iv.end) - a);
  };

  for (int n : r.levels) {
    std::vector<double> row;
    for (const auto& iv : r.intervals) row.push_back(lc_sum(used.level(n), iv));
    r.values.push_back(std::move(row));
  }
  r.limit = r.values.back();
  r.convergence = assess_convergence(r.values, options);

  if (phi.antiderivative && phi.phi_prime) {
    const auto grid = g.grid();
    for (std::size_t j = 0; j < r.intervals.size(); ++j) {
      const auto& iv = r.intervals[j];
      const double lhs = phi.antiderivative(x(iv.end)) - phi.antiderivative(x(iv.start));
      double second = 0.0;
      double a_t = iv.start;
      auto it = std::upper_bound(grid.begin(), grid.end(), iv.start);
      auto cell = [&](double a, double b) {
        const double ga = x(a);
        const double dg = x(b) - ga;
        double dc = dg * dg;
        const std::size_t bi = g.index_of(b);
        if (bi < g.size() && g.has_jump(bi)) dc -= g.jump(bi)[0] * g.jump(bi)[0];
        second += 0.5 * phi.phi_prime(ga) * dc;
      };
      for (; it != grid.end() && *it < iv.end; ++it) {
        cell(a_t, *it);
        a_t = *it;
      }
      cell(a_t, iv.end);
      double jumps = 0.0;
      for (std::size_t k : g.jump_indices()) {
        const double t = g.time(k);
        if (!(t > iv.start && t <= iv.end)) continue;
        const double before = g.left_limit(k, 0);
        const double after = g.value(k, 0);
        jumps += phi.antiderivative(after) - phi.antiderivative(before) - phi.phi(before) * (after - before);
      }
      r.chain_rule_residuals.push_back(std::abs(lhs - (r.limit[j] + second + jumps)));
    }
  }
  return r;
}

}  // namespace pathwise
