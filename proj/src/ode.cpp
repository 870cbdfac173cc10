#include "avgorbit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace avgorbit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::degenerate_map: return "degenerate_map";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::singular_jacobian: return "singular_jacobian";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "unknown";
}

const char* to_string(StabilityVerdict verdict) {
  switch (verdict) {
    case StabilityVerdict::asymptotically_stable: return "asymptotically_stable";
    case StabilityVerdict::marginal: return "marginal";
    case StabilityVerdict::unstable: return "unstable";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !(event_tol > 0.0) || !(rtol > 0.0) || !(atol > 0.0) ||
      !(min_step > 0.0)) {
    throw Error(ErrorKind::invalid_argument,
                "integrator tolerances and step must be strictly positive");
  }
  if (!(event_tol < step)) {
    throw Error(ErrorKind::invalid_argument,
                "event tolerance must be smaller than the base step");
  }
}

namespace {

Vec rk4_step(const PeriodicSystem& sys, double t, const Vec& x, double h,
             double eps) {
  const Vec k1 = sys(t, x, eps);
  const Vec k2 = sys(t + 0.5 * h, x + 0.5 * h * k1, eps);
  const Vec k3 = sys(t + 0.5 * h, x + 0.5 * h * k2, eps);
  const Vec k4 = sys(t + h, x + h * k3, eps);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class Stepper {
 public:
  Stepper(const PeriodicSystem& sys, double eps, const IntegratorConfig& cfg)
      : sys_(sys), eps_(eps), cfg_(cfg) {}

  // One accuracy-controlled advance over [t, t + h]: a full RK4 step is
  // compared against two half steps, and the interval is bisected
  // recursively until the difference meets atol + rtol * |x|.
  Vec advance(double t, const Vec& x, double h) const {
    const Vec full = rk4_step(sys_, t, x, h, eps_);
    const Vec mid = rk4_step(sys_, t, x, 0.5 * h, eps_);
    const Vec halves = rk4_step(sys_, t + 0.5 * h, mid, 0.5 * h, eps_);
    const double err = (halves - full).norm() / 15.0;
    const double allowed = cfg_.atol + cfg_.rtol * halves.norm();
    if (err <= allowed || !std::isfinite(err)) {
      return halves;
    }
    if (0.5 * h < cfg_.min_step) {
      std::ostringstream os;
      os << "step size underflow at t=" << t << " (h=" << h << ")";
      throw Error(ErrorKind::stiffness, os.str());
    }
    const Vec left = advance(t, x, 0.5 * h);
    return advance(t + 0.5 * h, left, 0.5 * h);
  }

  // Localizes the earliest sign change of any switch function inside
  // [t, t + h] by bisection on the substep length. Returns the substep length
  // just past the crossing, or a negative value if there is none.
  double locate_event(double t, const Vec& x, double h, const Vec& x_end) const {
    double best = -1.0;
    for (const auto& s : sys_.switches) {
      const double s0 = s(t, x);
      const double s1 = s(t + h, x_end);
      if (!(s0 * s1 < 0.0)) {
        continue;
      }
      double lo = 0.0;
      double hi = h;
      while (hi - lo > cfg_.event_tol) {
        const double mid = 0.5 * (lo + hi);
        const double sm = s(t + mid, rk4_step(sys_, t, x, mid, eps_));
        if (sm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((sm < 0.0) == (s0 < 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (best < 0.0 || hi < best) {
        best = hi;
      }
    }
    return best;
  }

 private:
  const PeriodicSystem& sys_;
  double eps_;
  const IntegratorConfig& cfg_;
};

void check_finite(const Vec& x, double last_time) {
  if (!x.allFinite()) {
    std::ostringstream os;
    os << "non-finite state after t=" << last_time;
    throw DivergenceError(last_time, os.str());
  }
}

}  // namespace

Trajectory integrate(const PeriodicSystem& sys, const Vec& x0, double t0,
                     double t1, double eps, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(t1 > t0)) {
    throw Error(ErrorKind::invalid_argument, "integrate requires t1 > t0");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "eps must lie in [0, 1]");
  }
  if (x0.size() != sys.dim) {
    throw Error(ErrorKind::invalid_argument, "initial state has wrong dimension");
  }
  if (!x0.allFinite()) {
    throw Error(ErrorKind::invalid_argument, "initial state is not finite");
  }

  const Stepper stepper(sys, eps, cfg);
  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(x0);

  // Grid points are t0 + j*h; events insert extra nodes between them.
  constexpr int kMaxEventsPerStep = 1000;
  const double span = t1 - t0;
  const auto n_steps = static_cast<long>(std::ceil(span / cfg.step - 1e-9));
  double t = t0;
  Vec x = x0;
  for (long j = 1; j <= n_steps; ++j) {
    const double t_grid = (j == n_steps) ? t1 : t0 + static_cast<double>(j) * cfg.step;
    int events_here = 0;
    while (t < t_grid) {
      const double h = t_grid - t;
      Vec x_next = stepper.advance(t, x, h);
      check_finite(x_next, t);
      const double h_event = sys.switches.empty() ? -1.0
                                                  : stepper.locate_event(t, x, h, x_next);
      if (h_event > 0.0 && h_event < h) {
        if (++events_here > kMaxEventsPerStep) {
          std::ostringstream os;
          os << "switching events accumulate near t=" << t;
          throw Error(ErrorKind::stiffness, os.str());
        }
        x_next = stepper.advance(t, x, h_event);
        check_finite(x_next, t);
        t += h_event;
        traj.event_times.push_back(t);
      } else {
        if (h_event >= h) {
          traj.event_times.push_back(t_grid);
        }
        t = t_grid;
      }
      x = std::move(x_next);
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
  }
  return traj;
}

PoincareResult poincare_map(const PeriodicSystem& sys, const Vec& v, double eps,
                            const IntegratorConfig& cfg) {
  const Trajectory traj = integrate(sys, v, 0.0, sys.period, eps, cfg);
  return PoincareResult{v, traj.final_state(), eps};
}

Mat poincare_jacobian(const PeriodicSystem& sys, const Vec& v, double eps,
                      const IntegratorConfig& cfg) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) *
                   std::max(1.0, v.norm());
  const auto k = v.size();
  Mat jac(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Vec plus = v;
    Vec minus = v;
    plus(j) += h;
    minus(j) -= h;
    jac.col(j) = (poincare_map(sys, plus, eps, cfg).image -
                  poincare_map(sys, minus, eps, cfg).image) /
                 (2.0 * h);
  }
  return jac;
}

FixedPointResult fixed_point(const PeriodicSystem& sys, const Vec& guess,
                             double eps, const IntegratorConfig& cfg,
                             double newton_tol, int max_iter) {
  if (eps == 0.0) {
    throw Error(ErrorKind::degenerate_map,
                "return map is the identity at eps = 0; every point is fixed");
  }
  if (!guess.allFinite()) {
    throw Error(ErrorKind::invalid_argument, "fixed point guess is not finite");
  }
  constexpr int kMaxHalvings = 30;
  auto residual_of = [&](const Vec& v) {
    return Vec(poincare_map(sys, v, eps, cfg).image - v);
  };

  Vec v = guess;
  Vec r = residual_of(v);
  double rnorm = r.norm();
  const Mat eye = Mat::Identity(sys.dim, sys.dim);
  for (int iter = 0; iter <= max_iter; ++iter) {
    if (rnorm <= newton_tol) {
      return FixedPointResult{v, rnorm, iter};
    }
    if (iter == max_iter) {
      break;
    }
    const Mat jac = poincare_jacobian(sys, v, eps, cfg) - eye;
    const Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) {
      throw Error(ErrorKind::singular_jacobian,
                  "singular Jacobian of P(v) - v during fixed point search");
    }
    const Vec delta = lu.solve(-r);
    double scale = 1.0;
    bool improved = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, scale *= 0.5) {
      const Vec trial = v + scale * delta;
      const Vec rt = residual_of(trial);
      if (rt.norm() < rnorm) {
        v = trial;
        r = rt;
        rnorm = rt.norm();
        improved = true;
        break;
      }
    }
    if (!improved) {
      break;
    }
  }
  std::ostringstream os;
  os << "fixed point iteration did not converge (best residual " << rnorm << ")";
  throw NonconvergenceError(rnorm, v, os.str());
}

double FloquetResult::max_modulus() const {
  double m = 0.0;
  for (const auto& z : multipliers) {
    m = std::max(m, std::abs(z));
  }
  return m;
}

FloquetResult floquet_multipliers(const Mat& monodromy, double margin) {
  FloquetResult out;
  if (monodromy.rows() == 2 && monodromy.cols() == 2) {
    const double tr = monodromy.trace();
    const double det = monodromy.determinant();
    const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 * tr * tr - det));
    out.multipliers = {0.5 * tr + disc, 0.5 * tr - disc};
  } else {
    const Eigen::EigenSolver<Mat> es(monodromy, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      out.multipliers.push_back(es.eigenvalues()(i));
    }
  }
  const double m = out.max_modulus();
  if (m < 1.0 - margin) {
    out.verdict = StabilityVerdict::asymptotically_stable;
  } else if (m > 1.0 + margin) {
    out.verdict = StabilityVerdict::unstable;
  } else {
    out.verdict = StabilityVerdict::marginal;
  }
  return out;
}

}  // namespace avgorbit
