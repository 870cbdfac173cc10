#include "avgorbit/verify.hpp"

#include <cmath>
#include <random>

namespace avgorbit {

namespace {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.last_time(), std::string(stage) + ": " + e.what());
  } catch (const NonconvergenceError& e) {
    throw NonconvergenceError(e.best_residual(), e.best_iterate(),
                              std::string(stage) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace

double simulated_amplitude(const PeriodicSystem& original, const Vec& v, double eps,
                           const IntegratorConfig& cfg) {
  const Trajectory traj = integrate(original, v, 0.0, original.period, eps, cfg);
  double amp = 0.0;
  for (const Vec& x : traj.states) {
    amp = std::max(amp, std::abs(x(0)));
  }
  return amp;
}

VerificationReport verify_branch(const ModelSpec& model, double eps, const Vec& v0_guess,
                                 const VerifyOptions& opts) {
  if (eps == 0.0) {
    throw Error(ErrorKind::degenerate_map,
                "eps = 0 gives the identity return map; nothing to verify");
  }
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw Error(ErrorKind::invalid_argument, "eps must lie in (0, 0.5]");
  }
  const AveragedField field = model.averaged_field(false, opts.quadrature);
  const PeriodicSystem original = model.system(Coordinates::original);

  const ZeroReport zero = staged("averaged zero", [&] {
    return find_zero(field, v0_guess, opts.zero);
  });
  const FixedPointResult fp = staged("return-map fixed point", [&] {
    return fixed_point(original, zero.v0, eps, opts.integrator, opts.newton_tol, opts.max_iter);
  });
  const Mat monodromy = staged("return-map Jacobian", [&] {
    return poincare_jacobian(original, fp.point, eps, opts.integrator);
  });
  const FloquetResult floquet = floquet_multipliers(monodromy, opts.floquet_margin);

  VerificationReport report;
  report.eps = eps;
  report.v0 = zero.v0;
  report.v_eps = fp.point;
  report.distance = (fp.point - zero.v0).norm();
  report.simulated_amplitude = staged("amplitude", [&] {
    return simulated_amplitude(original, fp.point, eps, opts.integrator);
  });
  report.predicted_amplitude = zero.v0.norm();
  report.floquet_multipliers = floquet.multipliers;
  report.stability_verdict = floquet.verdict;
  report.classification = zero.verdict;

  const bool predicted_stable =
      zero.verdict == Classification::unique_asymptotically_stable;
  const bool simulated_stable =
      floquet.verdict == StabilityVerdict::asymptotically_stable;
  report.agreement = zero.verdict != Classification::degenerate &&
                     report.distance <= opts.distance_per_eps * eps &&
                     predicted_stable == simulated_stable;
  return report;
}

EpsSweep eps_sweep(const ModelSpec& model, const Vec& v0_guess,
                   const std::vector<double>& eps_list, const VerifyOptions& opts) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
      throw Error(ErrorKind::invalid_argument,
                  "eps list must be positive and strictly decreasing");
    }
  }
  EpsSweep sweep;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double eps : eps_list) {
    SweepEntry entry;
    entry.eps = eps;
    try {
      entry.report = verify_branch(model, eps, v0_guess, opts);
      if (entry.report->distance > 0.0) {
        xs.push_back(std::log(eps));
        ys.push_back(std::log(entry.report->distance));
      }
    } catch (const Error& e) {
      entry.error = e.what();
    }
    sweep.entries.push_back(std::move(entry));
  }
  if (xs.size() >= 2) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    sweep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return sweep;
}

ContractionRate map_contraction_rate(const ModelSpec& model, double eps, const Vec& v_eps,
                                     double radius, int n_pairs, const VerifyOptions& opts,
                                     std::uint64_t seed) {
  const AveragedField field = model.averaged_field(false, opts.quadrature);
  const PeriodicSystem original = model.system(Coordinates::original);
  const Mat basis = adapted_basis(g0_jacobian(field, v_eps));
  const Eigen::FullPivLU<Mat> to_adapted(basis);
  const auto k = v_eps.size();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto sample = [&]() {
    Vec dir(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      dir(i) = normal(rng);
    }
    const double r = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(k));
    return Vec(v_eps + basis * (r * dir.normalized()));
  };

  ContractionRate out;
  out.eps = eps;
  for (int i = 0; i < n_pairs; ++i) {
    const Vec v1 = sample();
    const Vec v2 = sample();
    const double den = to_adapted.solve(Vec(v1 - v2)).norm();
    if (den == 0.0) {
      continue;
    }
    const Vec p1 = poincare_map(original, v1, eps, opts.integrator).image;
    const Vec p2 = poincare_map(original, v2, eps, opts.integrator).image;
    out.rho = std::max(out.rho, to_adapted.solve(Vec(p1 - p2)).norm() / den);
  }
  out.c = (1.0 - out.rho) / eps;
  out.contracting = out.rho < 1.0;
  return out;
}

}  // namespace avgorbit
