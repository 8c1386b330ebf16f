#include "optreg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "optreg/errors.hpp"
#include "optreg/text.hpp"

namespace optreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> common_skeleton(const LadlagPath& X, const Integrator& a) {
  const LadlagPath* paths[] = {&X, &a.right().path(), &a.left().path()};
  const double T[] = {X.horizon()};
  return union_times(paths, T);
}

// X-side statistic H⁻¹[G_{τ-} + β(G_{τ+} - G_{τ-})] with G = f∘X (or f²∘X),
// laid on the same skeleton as the F that produced `stop`.
double statistic(const LadlagPath& G, const StoppingTime& stop, double H) {
  const auto ev = G.events();
  const Event& e = ev[stop.event];
  double before;
  if (stop.via_jump || stop.fraction == 1.0) {
    before = e.x_minus;
  } else {
    const Event& p = ev[stop.event - 1];
    before = p.x_plus + stop.fraction * (e.x_minus - p.x_plus);
  }
  double jump = stop.via_jump ? stop.beta * (e.x_plus - e.x_minus) : 0.0;
  return (before + jump) / H;
}

void require_design(const IncreasingPath& F) {
  if (F.path().back().x_plus == 0.0)
    throw DegenerateDesignError("design process F vanishes on the whole horizon");
}

SequentialResult unavailable(double H, EstimatorForm form) {
  SequentialResult r;
  r.tau_H = kInf;
  r.theta_hat = kNaN;
  r.H = H;
  r.form = form;
  return r;
}

}  // namespace

std::string to_string(EstimatorForm form) {
  return form == EstimatorForm::corrected ? "corrected" : "literal";
}

EstimatorForm estimator_form_from_string(const std::string& s) {
  if (s == "corrected") return EstimatorForm::corrected;
  if (s == "literal") return EstimatorForm::literal;
  throw ConfigError("unknown estimator form '" + s + "'");
}

double structural_ls(const LadlagPath& X, const BilinearIntegrand& f,
                     const Integrator& a, double t) {
  const double ts[] = {t};
  return structural_ls(X, f, a, ts).front();
}

std::vector<double> structural_ls(const LadlagPath& X, const BilinearIntegrand& f,
                                  const Integrator& a, std::span<const double> ts) {
  const auto times = common_skeleton(X, a);
  const IncreasingPath F = F_process(f, a, times);
  const LadlagPath G = integral_path(f, X, times);
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const double design = value_at(F.path(), t, Side::at);
    if (design == 0.0)
      throw DegenerateDesignError("F_t = 0 at t = " + format_real(t));
    out.push_back(value_at(G, t, Side::at) / design);
  }
  return out;
}

StoppingTime stopping_rule(const IncreasingPath& F, double H) {
  if (!(H > 0.0)) throw DomainError("information level H must be positive");
  const auto ev = F.path().events();
  StoppingTime s;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Event& e = ev[i];
    if (e.x_minus >= H) {
      // Continuous crossing inside (t_{i-1}, t_i].
      if (i == 0) {
        s = StoppingTime{0.0, 0.0, true, e.x_minus, 0.0, 0, 1.0, false};
        return s;
      }
      const Event& p = ev[i - 1];
      const double rise = e.x_minus - p.x_plus;
      const double frac = rise > 0.0 ? std::clamp((H - p.x_plus) / rise, 0.0, 1.0) : 1.0;
      s.crossed = true;
      s.event = i;
      s.fraction = frac;
      s.tau = frac == 1.0 ? e.t : p.t + frac * (e.t - p.t);
      s.F_at_tau_minus = frac == 1.0 ? e.x_minus : H;
      s.jump_term = frac == 1.0 ? e.x_plus - e.x_minus : 0.0;
      s.beta = 0.0;
      s.via_jump = false;
      return s;
    }
    if (e.x_plus >= H) {
      s.crossed = true;
      s.event = i;
      s.fraction = 1.0;
      s.tau = e.t;
      s.F_at_tau_minus = e.x_minus;
      s.jump_term = e.x_plus - e.x_minus;
      s.beta = std::clamp((H - e.x_minus) / s.jump_term, 0.0, 1.0);
      s.via_jump = true;
      return s;
    }
  }
  const double tail = F.path().tail_slope();
  const Event& last = ev.back();
  if (last.t < F.path().horizon() && tail > 0.0) {
    const double reach = last.x_plus + tail * (F.path().horizon() - last.t);
    if (reach >= H) {
      // Crossing on the tail: close the path at the horizon and retry.
      return stopping_rule(IncreasingPath(close_at_horizon(F.path())), H);
    }
  }
  s.tau = kInf;
  s.crossed = false;
  s.beta = 0.0;
  s.F_at_tau_minus = last.x_plus;
  return s;
}

SequentialResult sequential_ls(const LadlagPath& X, const BilinearIntegrand& f,
                               const Integrator& a, double H, EstimatorForm form) {
  const double levels[] = {H};
  return sequential_ls(X, f, a, levels, form).front();
}

std::vector<SequentialResult> sequential_ls(const LadlagPath& X,
                                            const BilinearIntegrand& f,
                                            const Integrator& a,
                                            std::span<const double> levels,
                                            EstimatorForm form) {
  for (double H : levels)
    if (!(H > 0.0)) throw DomainError("information level H must be positive");
  const auto times = common_skeleton(X, a);
  const IncreasingPath F = F_process(f, a, times);
  require_design(F);
  std::vector<StoppingTime> stops;
  bool any = false;
  for (double H : levels) {
    stops.push_back(stopping_rule(F, H));
    any = any || stops.back().crossed;
  }
  std::vector<SequentialResult> out;
  if (!any) {
    for (double H : levels) out.push_back(unavailable(H, form));
    return out;
  }
  const LadlagPath G = integral_path(
      form == EstimatorForm::corrected ? f : f.squared(), X, times);
  if (G.size() != F.path().size())
    throw std::logic_error("estimator skeletons diverged");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const StoppingTime& s = stops[k];
    if (!s.crossed) {
      out.push_back(unavailable(levels[k], form));
      continue;
    }
    SequentialResult r;
    r.tau_H = s.tau;
    r.beta_H = s.beta;
    r.F_at_tau_minus = s.F_at_tau_minus;
    r.H = levels[k];
    r.crossed = true;
    r.form = form;
    r.theta_hat = statistic(G, s, levels[k]);
    out.push_back(r);
  }
  return out;
}

GMap GMap::identity() {
  return GMap{"identity", [](double x) { return x; }, [](double x) { return x; },
              [](double) { return true; }};
}

GMap GMap::sqrt_map() {
  return GMap{"sqrt",
              [](double theta) {
                if (theta < 0.0) throw DomainError("sqrt link needs theta >= 0");
                return std::sqrt(theta);
              },
              [](double x) { return x * x; }, [](double) { return true; }};
}

NonlinearResult nonlinear_sequential(const LadlagPath& X, const BilinearIntegrand& f,
                                     const Integrator& a, double H, const GMap& g,
                                     EstimatorForm form) {
  NonlinearResult r;
  r.inner = sequential_ls(X, f, a, H, form);
  r.zeta_hat = r.inner.theta_hat;
  r.in_domain = r.inner.available() && g.inverse_domain(r.zeta_hat);
  r.theta_hat = r.in_domain ? g.inverse(r.zeta_hat) : kNaN;
  return r;
}

GConditionResult g_condition_check(const std::function<double(double)>& g_inverse,
                                   double step, double max_cutoff,
                                   double tail_threshold) {
  if (!(step > 0.0) || !(max_cutoff > step))
    throw DomainError("g_condition_check: need 0 < step < max_cutoff");
  auto integrand = [&](double x) {
    const double v = g_inverse(x);
    return v * v * std::exp(-0.5 * x * x);
  };
  auto small = [&](double x) {
    const double v = integrand(x);
    return std::isfinite(v) && std::abs(v) < tail_threshold;
  };
  double L = step;
  while (true) {
    if (L > max_cutoff) return GConditionResult{kInf, false, max_cutoff};
    bool quiet = true;
    for (int k = 0; k < 3 && quiet; ++k) {
      const double x = L + k * step;
      quiet = small(x) && small(-x);
    }
    if (quiet) break;
    L += step;
  }
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, -L, L, 20, 1e-14, &error);
  return GConditionResult{value, std::isfinite(value), L};
}

}  // namespace optreg
