#include "pathwise/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pathwise/errors.hpp"

namespace pathwise {

namespace {

Vector unit(std::size_t d, std::size_t i, double h) {
  Vector e(d, 0.0);
  e[i] = h;
  return e;
}

Vector vertical_bumps(const StoppedPath& sp, double rel) {
  Vector h(sp.dim());
  for (std::size_t i = 0; i < sp.dim(); ++i) h[i] = rel * (1.0 + std::abs(sp.current(i)));
  return h;
}

void require_dim(const Functional& f, const StoppedPath& sp) {
  if (f.dim != sp.dim())
    throw std::invalid_argument("functional '" + f.name + "' expects dimension " +
                                std::to_string(f.dim) + ", path has " +
                                std::to_string(sp.dim()));
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

Vector vertical_derivative_fd(const Functional& f, const StoppedPath& sp, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("vertical bump must be positive");
  require_dim(f, sp);
  Vector g(sp.dim());
  for (std::size_t i = 0; i < sp.dim(); ++i) {
    const Vector e = unit(sp.dim(), i, h);
    const Vector me = unit(sp.dim(), i, -h);
    g[i] = (f.eval(sp.perturbed(e)) - f.eval(sp.perturbed(me))) / (2.0 * h);
  }
  return g;
}

Vector vertical_derivative_fd(const Functional& f, const StoppedPath& sp,
                              const DerivativeOptions& options) {
  require_dim(f, sp);
  const Vector h = vertical_bumps(sp, options.vertical_bump_rel);
  Vector g(sp.dim());
  for (std::size_t i = 0; i < sp.dim(); ++i) {
    g[i] = (f.eval(sp.perturbed(unit(sp.dim(), i, h[i]))) -
            f.eval(sp.perturbed(unit(sp.dim(), i, -h[i])))) /
           (2.0 * h[i]);
  }
  return g;
}

Matrix vertical_hessian_fd(const Functional& f, const StoppedPath& sp,
                           const DerivativeOptions& options) {
  require_dim(f, sp);
  const std::size_t d = sp.dim();
  const Vector h = vertical_bumps(sp, options.vertical_bump_rel);
  const double f0 = f.eval(sp);
  Matrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double up = f.eval(sp.perturbed(unit(d, i, h[i])));
    const double dn = f.eval(sp.perturbed(unit(d, i, -h[i])));
    m(i, i) = (up - 2.0 * f0 + dn) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < d; ++j) {
      auto shifted = [&](double si, double sj) {
        Vector delta(d, 0.0);
        delta[i] = si * h[i];
        delta[j] = sj * h[j];
        return f.eval(sp.perturbed(delta));
      };
      const double v =
          (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h[i] * h[j]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

double horizontal_derivative_fd(const Functional& f, const StoppedPath& sp, double h,
                                bool richardson) {
  if (!(h > 0.0)) throw std::invalid_argument("horizontal step must be positive");
  require_dim(f, sp);
  const double t = sp.time();
  if (!(t < sp.horizon())) throw std::out_of_range("no horizontal derivative at the horizon");
  if (t + h > sp.horizon()) throw std::out_of_range("horizontal step runs past the horizon");
  const double f0 = f.eval(sp);
  const double d1 = (f.eval(sp.extended(t + h)) - f0) / h;
  if (!richardson) return d1;
  const double d2 = (f.eval(sp.extended(t + 0.5 * h)) - f0) / (0.5 * h);
  return 2.0 * d2 - d1;
}

double horizontal_derivative_fd(const Functional& f, const StoppedPath& sp,
                                const DerivativeOptions& options) {
  const double t = sp.time();
  if (!(t < sp.horizon())) throw std::out_of_range("no horizontal derivative at the horizon");
  const double h = options.horizontal_step.value_or(std::min(1e-4, 0.5 * (sp.horizon() - t)));
  return horizontal_derivative_fd(f, sp, h, options.richardson);
}

bool has_gradient(const Functional& f, const DerivativeOptions& options) {
  return static_cast<bool>(f.vertical_gradient) || options.allow_fd;
}

Vector gradient(const Functional& f, const StoppedPath& sp, const DerivativeOptions& options) {
  if (f.vertical_gradient) return f.vertical_gradient(sp);
  if (!options.allow_fd)
    throw CapabilityError("functional '" + f.name + "' has no vertical gradient");
  return vertical_derivative_fd(f, sp, options);
}

Matrix hessian(const Functional& f, const StoppedPath& sp, const DerivativeOptions& options) {
  if (f.vertical_hessian) return f.vertical_hessian(sp);
  if (!options.allow_fd)
    throw CapabilityError("functional '" + f.name + "' has no second vertical derivative");
  return vertical_hessian_fd(f, sp, options);
}

double horizontal(const Functional& f, const StoppedPath& sp, const DerivativeOptions& options) {
  if (f.horizontal) return f.horizontal(sp);
  if (!options.allow_fd)
    throw CapabilityError("functional '" + f.name + "' has no horizontal derivative");
  return horizontal_derivative_fd(f, sp, options);
}

DensitySpec DensitySpec::constant(Matrix a) {
  return {"constant", [a = std::move(a)](double, std::span<const double>) { return a; }};
}

DensitySpec DensitySpec::geometric(double sigma, std::size_t dim) {
  if (!(sigma > 0.0)) throw std::invalid_argument("density sigma must be positive");
  return {"geometric", [sigma, dim](double, std::span<const double> x) {
            if (x.size() != dim) throw std::invalid_argument("density: dimension mismatch");
            Matrix m(dim);
            for (std::size_t i = 0; i < dim; ++i) m(i, i) = sigma * sigma * x[i] * x[i];
            return m;
          }};
}

double fpde_residual(const Functional& f, const DensitySpec& a, const StoppedPath& sp,
                     const DerivativeOptions& options) {
  if (!(sp.time() < sp.horizon())) throw std::out_of_range("FPDE residual needs t < T");
  const double df = horizontal(f, sp, options);
  const Matrix h = hessian(f, sp, options);
  return df + 0.5 * trace_product(a(sp.time(), sp.current()), h);
}

CylinderFunction named_cylinder(const std::string& name, std::size_t dim) {
  auto scalar_only = [&] {
    if (dim != 1) throw std::invalid_argument("cylinder '" + name + "' is scalar");
  };
  if (name == "identity") {
    scalar_only();
    return {name, 1, [](std::span<const double> x) { return x[0]; },
            [](std::span<const double>) { return Vector{1.0}; },
            [](std::span<const double>) { return Matrix(1); }};
  }
  if (name == "square") {
    scalar_only();
    return {name, 1, [](std::span<const double> x) { return x[0] * x[0]; },
            [](std::span<const double> x) { return Vector{2.0 * x[0]}; },
            [](std::span<const double>) { return Matrix(1, 2.0); }};
  }
  if (name == "cube") {
    scalar_only();
    return {name, 1, [](std::span<const double> x) { return x[0] * x[0] * x[0]; },
            [](std::span<const double> x) { return Vector{3.0 * x[0] * x[0]}; },
            [](std::span<const double> x) { return Matrix(1, 6.0 * x[0]); }};
  }
  if (name == "exp") {
    scalar_only();
    return {name, 1, [](std::span<const double> x) { return std::exp(x[0]); },
            [](std::span<const double> x) { return Vector{std::exp(x[0])}; },
            [](std::span<const double> x) { return Matrix(1, std::exp(x[0])); }};
  }
  if (name == "product") {
    if (dim != 2) throw std::invalid_argument("cylinder 'product' needs dimension 2");
    return {name, 2, [](std::span<const double> x) { return x[0] * x[1]; },
            [](std::span<const double> x) { return Vector{x[1], x[0]}; },
            [](std::span<const double>) {
              Matrix m(2);
              m(0, 1) = 1.0;
              m(1, 0) = 1.0;
              return m;
            }};
  }
  if (name == "sum_squares") {
    if (dim == 0) throw std::invalid_argument("cylinder dimension must be positive");
    return {name, dim,
            [](std::span<const double> x) {
              double s = 0.0;
              for (double v : x) s += v * v;
              return s;
            },
            [](std::span<const double> x) {
              Vector g(x.size());
              for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
              return g;
            },
            [dim](std::span<const double>) {
              Matrix m(dim);
              for (std::size_t i = 0; i < dim; ++i) m(i, i) = 2.0;
              return m;
            }};
  }
  throw std::invalid_argument("unknown cylinder function '" + name + "'");
}

Functional identity_functional(std::size_t dim, std::size_t coordinate) {
  if (coordinate >= dim) throw std::invalid_argument("identity: coordinate out of range");
  Functional f;
  f.name = "identity_" + std::to_string(coordinate + 1);
  f.dim = dim;
  f.eval = [coordinate](const StoppedPath& sp) { return sp.current(coordinate); };
  f.vertical_gradient = [dim, coordinate](const StoppedPath&) { return unit(dim, coordinate, 1.0); };
  f.vertical_hessian = [dim](const StoppedPath&) { return Matrix(dim); };
  f.horizontal = [](const StoppedPath&) { return 0.0; };
  f.regularity = {true, true, true, true, true};
  return f;
}

Functional cylinder_functional(const CylinderFunction& c) {
  if (!c.f) throw std::invalid_argument("cylinder function without f");
  Functional f;
  f.name = "cylinder_" + c.name;
  f.dim = c.dim;
  f.eval = [fn = c.f](const StoppedPath& sp) { return fn(sp.current()); };
  if (c.grad) f.vertical_gradient = [g = c.grad](const StoppedPath& sp) { return g(sp.current()); };
  if (c.hess) f.vertical_hessian = [h = c.hess](const StoppedPath& sp) { return h(sp.current()); };
  f.horizontal = [](const StoppedPath&) { return 0.0; };
  f.regularity = {true, true, true, true, static_cast<bool>(c.grad) && static_cast<bool>(c.hess)};
  return f;
}

Functional running_integral_functional(std::size_t dim, std::size_t coordinate) {
  if (coordinate >= dim) throw std::invalid_argument("running_integral: coordinate out of range");
  Functional f;
  f.name = "running_integral";
  f.dim = dim;
  f.eval = [coordinate](const StoppedPath& sp) { return sp.running_integral(coordinate); };
  f.vertical_gradient = [dim](const StoppedPath&) { return Vector(dim, 0.0); };
  f.vertical_hessian = [dim](const StoppedPath&) { return Matrix(dim); };
  f.horizontal = [coordinate](const StoppedPath& sp) { return sp.current(coordinate); };
  f.regularity = {true, true, true, true, true};
  return f;
}

Functional asian_forward_functional(double maturity, std::size_t dim, std::size_t coordinate) {
  if (!(maturity > 0.0)) throw std::invalid_argument("asian_forward: maturity must be positive");
  if (coordinate >= dim) throw std::invalid_argument("asian_forward: coordinate out of range");
  Functional f;
  f.name = "asian_forward";
  f.dim = dim;
  f.eval = [maturity, coordinate](const StoppedPath& sp) {
    return sp.running_integral(coordinate) + sp.current(coordinate) * (maturity - sp.time());
  };
  f.vertical_gradient = [maturity, dim, coordinate](const StoppedPath& sp) {
    return unit(dim, coordinate, maturity - sp.time());
  };
  f.vertical_hessian = [dim](const StoppedPath&) { return Matrix(dim); };
  f.horizontal = [](const StoppedPath&) { return 0.0; };
  f.regularity = {true, true, true, true, true};
  return f;
}

BlackScholesValues black_scholes(double spot, double strike, double sigma, double tau,
                                 OptionType type) {
  BlackScholesValues v;
  const bool call = type == OptionType::call;
  if (spot <= 0.0) {
    // Absorbed at zero: the claim is worth its intrinsic value.
    v.price = call ? 0.0 : strike - spot;
    v.delta = call ? 0.0 : -1.0;
    return v;
  }
  if (tau <= 0.0) {
    v.price = call ? std::max(spot - strike, 0.0) : std::max(strike - spot, 0.0);
    v.delta = call ? (spot > strike ? 1.0 : 0.0) : (spot < strike ? -1.0 : 0.0);
    return v;
  }
  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(spot / strike) + 0.5 * sigma * sigma * tau) / vol;
  const double d2 = d1 - vol;
  const double call_price = spot * norm_cdf(d1) - strike * norm_cdf(d2);
  v.price = call ? call_price : call_price - spot + strike;
  v.delta = call ? norm_cdf(d1) : norm_cdf(d1) - 1.0;
  v.gamma = norm_pdf(d1) / (spot * vol);
  v.time_derivative = -spot * norm_pdf(d1) * sigma / (2.0 * std::sqrt(tau));
  return v;
}

Functional black_scholes_functional(double sigma, double strike, double maturity, OptionType type) {
  if (!(sigma > 0.0)) throw std::invalid_argument("black_scholes: sigma must be positive");
  if (!(strike > 0.0)) throw std::invalid_argument("black_scholes: strike must be positive");
  if (!(maturity > 0.0)) throw std::invalid_argument("black_scholes: maturity must be positive");
  auto values = [=](const StoppedPath& sp) {
    return black_scholes(sp.current(0), strike, sigma, maturity - sp.time(), type);
  };
  Functional f;
  f.name = "black_scholes";
  f.dim = 1;
  f.eval = [values](const StoppedPath& sp) { return values(sp).price; };
  f.vertical_gradient = [values](const StoppedPath& sp) { return Vector{values(sp).delta}; };
  f.vertical_hessian = [values](const StoppedPath& sp) { return Matrix(1, values(sp).gamma); };
  f.horizontal = [values](const StoppedPath& sp) { return values(sp).time_derivative; };
  f.regularity = {true, true, true, true, true};
  return f;
}

Functional builtin(const FunctionalSpec& spec) {
  if (spec.name == "identity") return identity_functional(spec.dim, spec.coordinate);
  if (spec.name == "cylinder") return cylinder_functional(named_cylinder(spec.cylinder, spec.dim));
  if (spec.name == "running_integral") return running_integral_functional(spec.dim, spec.coordinate);
  if (spec.name == "asian_forward")
    return asian_forward_functional(spec.maturity, spec.dim, spec.coordinate);
  if (spec.name == "black_scholes") {
    if (spec.dim != 1) throw std::invalid_argument("black_scholes is scalar");
    return black_scholes_functional(spec.sigma, spec.strike, spec.maturity, spec.option);
  }
  throw std::invalid_argument("unknown functional '" + spec.name + "'");
}

Payoff vanilla_payoff(double strike, OptionType type, std::size_t coordinate) {
  return [=](const SampledPath& path) {
    const double s = path.value(path.size() - 1, coordinate);
    return type == OptionType::call ? std::max(s - strike, 0.0) : std::max(strike - s, 0.0);
  };
}

Payoff average_payoff(std::size_t coordinate) {
  return [coordinate](const SampledPath& path) {
    return path.running_integral(path.horizon(), coordinate);
  };
}

RegularityCheck spot_check_regularity(const Functional& f, const SampledPath& path,
                                      std::span<const double> times, double perturbation) {
  if (!(perturbation > 0.0)) throw std::invalid_argument("perturbation must be positive");
  RegularityCheck out;
  for (double t : times) {
    const StoppedPath sp = stop(path, t, Side::right);
    require_dim(f, sp);
    const double f0 = f.eval(sp);
    for (std::size_t i = 0; i < sp.dim(); ++i) {
      const double fi = f.eval(sp.perturbed(unit(sp.dim(), i, perturbation)));
      out.vertical_sensitivity = std::max(out.vertical_sensitivity, std::abs(fi - f0) / perturbation);
    }
    if (t + perturbation <= path.horizon()) {
      const double fh = f.eval(sp.extended(t + perturbation));
      out.horizontal_sensitivity =
          std::max(out.horizontal_sensitivity, std::abs(fh - f0) / perturbation);
    }
    const std::size_t idx = path.index_of(t);
    if (idx < path.size() && !path.has_jump(idx))
      out.left_right_gap = std::max(out.left_right_gap, std::abs(f0 - f.eval(stop(path, t, Side::left))));
    ++out.samples;
  }
  return out;
}

}  // namespace pathwise
