#include "avgorbit/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "avgorbit/quadrature.hpp"

namespace avgorbit {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::existence_only: return "existence_only";
    case Classification::unique_asymptotically_stable: return "unique_asymptotically_stable";
    case Classification::non_asymptotically_stable: return "non_asymptotically_stable";
    case Classification::degenerate: return "degenerate";
  }
  return "unknown";
}

std::vector<double> kink_angles(const PeriodicSystem& sys, const Vec& v,
                                const QuadratureConfig& quad) {
  std::vector<double> out;
  const double period = sys.period;
  const double cell = period / quad.scan_cells;
  for (const auto& s : sys.switches) {
    double prev = s(0.0, v);
    for (int k = 1; k <= quad.scan_cells; ++k) {
      const double lo_t = (k - 1) * cell;
      const double hi_t = (k == quad.scan_cells) ? period : k * cell;
      const double cur = s(hi_t, v);
      if (prev == 0.0 && k > 1) {  // zero exactly on an interior grid point
        out.push_back(lo_t);
      } else if (prev * cur < 0.0) {
        double lo = lo_t;
        double hi = hi_t;
        const bool lo_negative = prev < 0.0;
        while (hi - lo > quad.kink_tol) {
          const double mid = 0.5 * (lo + hi);
          const double sm = s(mid, v);
          if (sm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((sm < 0.0) == lo_negative) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        out.push_back(0.5 * (lo + hi));
      }
      prev = cur;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double x, double y) { return y - x <= quad.kink_tol; }),
            out.end());
  return out;
}

Vec eval_g0_numeric(const AveragedField& field, const Vec& v) {
  const PeriodicSystem& sys = field.system;
  const QuadratureConfig& quad = field.quadrature;
  if (!sys.perturbation) {
    throw Error(ErrorKind::unsupported,
                "system '" + sys.name + "' is not in standard form x' = eps g(t, x, eps)");
  }
  auto integrand = [&](double tau) { return sys.perturbation(tau, v, 0.0); };

  std::vector<double> breaks{0.0};
  if (quad.split_at_kinks && !sys.switches.empty()) {
    for (double tau : kink_angles(sys, v, quad)) {
      breaks.push_back(tau);
    }
  }
  breaks.push_back(sys.period);

  Vec sum = Vec::Zero(sys.dim);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) {
      sum += integrate_gauss(integrand, breaks[i], breaks[i + 1], quad.nodes_per_piece);
    }
  }
  return sum;
}

Vec eval_g0(const AveragedField& field, const Vec& v) {
  if (field.analytic) {
    return field.analytic->g0(v);
  }
  return eval_g0_numeric(field, v);
}

namespace {

bool at_singular_point(const AveragedField& field, const Vec& v, double radius) {
  return std::any_of(field.singular_points.begin(), field.singular_points.end(),
                     [&](const Vec& p) { return (v - p).norm() <= radius; });
}

void require_regular(const AveragedField& field, const Vec& v) {
  constexpr double kExactRadius = 1e-12;
  if (at_singular_point(field, v, kExactRadius)) {
    std::ostringstream os;
    os << "g0 is not differentiable at (" << v.transpose() << ")";
    throw Error(ErrorKind::domain, os.str());
  }
}

Mat fd_jacobian(const AveragedField& field, const Vec& v) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) *
                   std::max(1.0, v.norm());
  const auto k = v.size();
  Mat jac(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Vec plus = v;
    Vec minus = v;
    plus(j) += h;
    minus(j) -= h;
    jac.col(j) = (eval_g0_numeric(field, plus) - eval_g0_numeric(field, minus)) / (2.0 * h);
  }
  return jac;
}

}  // namespace

Mat g0_jacobian_numeric(const AveragedField& field, const Vec& v) {
  require_regular(field, v);
  return fd_jacobian(field, v);
}

Mat g0_jacobian(const AveragedField& field, const Vec& v) {
  require_regular(field, v);
  if (field.analytic && field.analytic->jacobian) {
    return field.analytic->jacobian(v);
  }
  return fd_jacobian(field, v);
}

Classification classify_zero(const Mat& jacobian, const ClassifyOptions& opts) {
  const double tol = opts.degeneracy_rel * std::max(1.0, jacobian.norm());
  const double det = jacobian.determinant();
  if (std::abs(det) <= tol) {
    return Classification::degenerate;
  }
  if (jacobian.rows() == 2) {
    if (det > 0.0 && jacobian.trace() < 0.0) {
      return Classification::unique_asymptotically_stable;
    }
    if (det < 0.0) {
      return Classification::non_asymptotically_stable;
    }
    return Classification::existence_only;
  }
  const Eigen::EigenSolver<Mat> es(jacobian, false);
  const bool all_negative = (es.eigenvalues().real().array() < 0.0).all();
  return all_negative ? Classification::unique_asymptotically_stable
                      : Classification::existence_only;
}

ZeroReport find_zero(const AveragedField& field, const Vec& guess,
                     const ZeroSolveOptions& opts) {
  if (!guess.allFinite()) {
    throw Error(ErrorKind::invalid_argument, "zero guess is not finite");
  }
  require_regular(field, guess);

  constexpr int kMaxHalvings = 30;
  Vec v = guess;
  Vec g = eval_g0(field, v);
  double gnorm = g.norm();
  int iter = 0;
  for (; gnorm > opts.tol; ++iter) {
    if (iter == opts.max_iter) {
      std::ostringstream os;
      os << "zero search did not converge (best residual " << gnorm << ")";
      throw NonconvergenceError(gnorm, v, os.str());
    }
    const Mat jac = g0_jacobian(field, v);
    const Eigen::FullPivLU<Mat> lu(jac);
    if (lu.rank() < jac.rows()) {
      throw Error(ErrorKind::singular_jacobian,
                  "singular Jacobian during zero search; the zero may be degenerate");
    }
    const Vec delta = lu.solve(-g);
    double scale = 1.0;
    bool improved = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, scale *= 0.5) {
      const Vec trial = v + scale * delta;
      if (at_singular_point(field, trial, 1e-12)) {
        continue;
      }
      const Vec gt = eval_g0(field, trial);
      if (gt.norm() < gnorm) {
        v = trial;
        g = gt;
        gnorm = gt.norm();
        improved = true;
        break;
      }
    }
    if (!improved) {
      std::ostringstream os;
      os << "zero search stalled (best residual " << gnorm << ")";
      throw NonconvergenceError(gnorm, v, os.str());
    }
  }

  ZeroReport report;
  report.v0 = v;
  report.residual = gnorm;
  report.iterations = iter;
  report.jacobian = g0_jacobian(field, v);
  report.det = report.jacobian.determinant();
  report.trace = report.jacobian.trace();
  const Eigen::EigenSolver<Mat> es(report.jacobian, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    report.eigen_real_parts.push_back(es.eigenvalues()(i).real());
  }
  std::sort(report.eigen_real_parts.begin(), report.eigen_real_parts.end());
  report.verdict = classify_zero(report.jacobian, opts.classify);
  if (at_singular_point(field, v, opts.singular_radius)) {
    report.verdict = Classification::degenerate;
    report.warning = "zero lies within the nondifferentiability radius of a singular point";
  }
  return report;
}

Mat adapted_basis(const Mat& jacobian) {
  const auto k = jacobian.rows();
  const Eigen::EigenSolver<Mat> es(jacobian, true);
  const auto values = es.eigenvalues();
  const auto vectors = es.eigenvectors();
  Mat basis(k, k);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < k && col < k; ++i) {
    const double im = values(i).imag();
    if (im == 0.0) {
      basis.col(col++) = vectors.col(i).real().normalized();
    } else if (im > 0.0 && col + 1 < k) {
      basis.col(col++) = vectors.col(i).real().normalized();
      basis.col(col++) = vectors.col(i).imag().normalized();
    }
  }
  constexpr double kMaxCondition = 1e8;
  bool usable = (col == k);
  if (usable) {
    const Eigen::JacobiSVD<Mat> svd(basis);
    const auto& sv = svd.singularValues();
    usable = sv(k - 1) > 0.0 && sv(0) / sv(k - 1) < kMaxCondition;
  }
  if (!usable) {
    const Eigen::RealSchur<Mat> schur(jacobian);
    return schur.matrixU();
  }
  return basis;
}

double contraction_probe(const AveragedField& field, const Vec& v0, double alpha,
                         double radius, int n_samples, std::uint64_t seed) {
  const Mat basis = adapted_basis(g0_jacobian(field, v0));
  const Eigen::FullPivLU<Mat> to_adapted(basis);
  const auto k = v0.size();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto sample = [&]() {
    Vec dir(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      dir(i) = normal(rng);
    }
    const double r = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(k));
    return Vec(v0 + basis * (r * dir.normalized()));
  };
  auto step = [&](const Vec& v) { return Vec(v + alpha * eval_g0(field, v)); };

  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const Vec v1 = sample();
    const Vec v2 = sample();
    const double den = to_adapted.solve(Vec(v1 - v2)).norm();
    if (den == 0.0) {
      continue;
    }
    const double num = to_adapted.solve(Vec(step(v1) - step(v2))).norm();
    worst = std::max(worst, num / den);
  }
  return worst;
}

}  // namespace avgorbit
