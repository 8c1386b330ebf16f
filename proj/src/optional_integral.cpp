#include "optreg/optional_integral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "optreg/errors.hpp"
#include "optreg/text.hpp"

namespace optreg {

namespace {

// Neumaier's compensated running sum.
class RunningSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ∫_0^1 ds / (1 + a0 + s (a1 - a0)), the mean of 1/(1+A) over a linear segment.
double mean_inverse(double a0, double a1) {
  double base = 1.0 + a0;
  double u = (a1 - a0) / base;
  if (std::abs(u) < 1e-5) return (1.0 - u / 2.0 + u * u / 3.0 - u * u * u / 4.0) / base;
  return std::log1p(u) / (u * base);
}

std::vector<double> skeleton_of(std::initializer_list<const LadlagPath*> paths,
                                std::span<const double> extra, double horizon) {
  std::vector<const LadlagPath*> ptrs;
  for (auto* p : paths)
    if (p != nullptr) ptrs.push_back(p);
  std::vector<double> ex(extra.begin(), extra.end());
  ex.push_back(horizon);
  auto times = union_times(ptrs, ex);
  times.erase(std::remove_if(times.begin(), times.end(),
                             [&](double t) { return t < 0.0 || t > horizon; }),
              times.end());
  return times;
}

void require_same_horizon(const LadlagPath& a, const LadlagPath& b,
                          const char* what) {
  if (a.horizon() != b.horizon())
    throw DomainError(std::string(what) + ": mismatched horizons");
}

}  // namespace

BilinearIntegrand::BilinearIntegrand(PredictableRule predictable,
                                     OptionalRule optional,
                                     std::shared_ptr<const LadlagPath> state)
    : predictable_(std::move(predictable)),
      optional_(std::move(optional)),
      state_(std::move(state)) {}

BilinearIntegrand BilinearIntegrand::constant(double fr, double fg) {
  return BilinearIntegrand([fr](double, double) { return fr; },
                           [fg](double, double, double) { return fg; });
}

double BilinearIntegrand::predictable_at(double t, double state_left) const {
  double v = predictable_ ? predictable_(t, state_left)
                          : std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(v))
    throw EvaluationError("predictable integrand undefined at t = " + format_real(t), t);
  return v;
}

double BilinearIntegrand::optional_at(double t, double state_left,
                                      double state_at) const {
  double v = optional_ ? optional_(t, state_left, state_at)
                       : std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(v))
    throw EvaluationError("optional integrand undefined at t = " + format_real(t), t);
  return v;
}

BilinearIntegrand BilinearIntegrand::squared() const {
  auto r = predictable_;
  auto g = optional_;
  return BilinearIntegrand(
      [r](double t, double l) {
        double v = r(t, l);
        return v * v;
      },
      [g](double t, double l, double x) {
        double v = g(t, l, x);
        return v * v;
      },
      state_);
}

BilinearIntegrand combine(double alpha, const BilinearIntegrand& f, double beta,
                          const BilinearIntegrand& g) {
  if (f.state_ptr() != g.state_ptr())
    throw DomainError("combine: integrands driven by different states");
  return BilinearIntegrand(
      [=](double t, double l) {
        return alpha * f.predictable_at(t, l) + beta * g.predictable_at(t, l);
      },
      [=](double t, double l, double x) {
        return alpha * f.optional_at(t, l, x) + beta * g.optional_at(t, l, x);
      },
      f.state_ptr());
}

Integrator::Integrator(IncreasingPath right, IncreasingPath left)
    : right_(std::move(right)), left_(std::move(left)) {
  require_same_horizon(right_.path(), left_.path(), "integrator");
  for (const auto& e : right_.path().events())
    if (e.delta_plus() != 0.0)
      throw DomainError("right-continuous leg has a forward jump at t = " +
                        format_real(e.t));
  const auto ev = left_.path().events();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].delta() != 0.0 ||
        (i > 0 && ev[i].x_minus != ev[i - 1].x_plus))
      throw DomainError("left-continuous leg may only grow by forward jumps (t = " +
                        format_real(ev[i].t) + ")");
  }
  if (left_.path().tail_slope() != 0.0)
    throw DomainError("left-continuous leg may only grow by forward jumps");
}

Integrator Integrator::time(double horizon) {
  return from_right(IncreasingPath(LadlagPath::line(horizon, 1.0)));
}

Integrator Integrator::from_right(IncreasingPath right) {
  double horizon = right.path().horizon();
  return Integrator(std::move(right), IncreasingPath(LadlagPath::zero(horizon)));
}

LadlagPath Integrator::combined() const {
  return add(right_.path(), left_.path());
}

Integrator Integrator::refined(std::span<const double> times) const {
  return Integrator(IncreasingPath(refine(right_.path(), times)),
                    IncreasingPath(refine(left_.path(), times)));
}

LadlagPath integral_path(const BilinearIntegrand& f, const LadlagPath& integrator,
                         std::span<const double> extra_times) {
  const double horizon = integrator.horizon();
  const auto times =
      skeleton_of({&integrator, f.state()}, extra_times, horizon);
  PathCursor y_cursor(integrator);
  std::optional<PathCursor> s_cursor;
  if (f.state() != nullptr) s_cursor.emplace(*f.state());

  std::vector<Event> out;
  out.reserve(times.size());
  RunningSum g;
  Event prev_y{}, prev_s{};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Event y = y_cursor.sample(t);
    const Event s = s_cursor ? s_cursor->sample(t) : Event{t, 0.0, 0.0, 0.0};
    if (i > 0) {
      double inc = y.x_minus - prev_y.x_plus;
      if (inc != 0.0) g.add(f.predictable_at(prev_y.t, prev_s.x_plus) * inc);
    }
    Event e{t, g.value(), 0.0, 0.0};
    double d = y.x - y.x_minus;
    if (d != 0.0) g.add(f.predictable_at(t, s.x_minus) * d);
    e.x = g.value();
    double dp = y.x_plus - y.x;
    if (dp != 0.0) g.add(f.optional_at(t, s.x_minus, s.x) * dp);
    e.x_plus = g.value();
    if (i == 0) e.x_minus = e.x = 0.0;  // no right-leg charge at time 0
    out.push_back(e);
    prev_y = y;
    prev_s = s;
  }
  return LadlagPath(std::move(out), horizon, integrator.rule());
}

double optional_integral(const BilinearIntegrand& f, const Integrator& a,
                         double t) {
  return value_at(integral_path(f, a.combined()), t, Side::at);
}

IncreasingPath F_process(const BilinearIntegrand& f, const Integrator& a,
                         std::span<const double> extra_times) {
  LadlagPath raw = integral_path(f.squared(), a.combined(), extra_times);
  // Compensated sums of nonnegative terms can wobble by an ulp; pin monotonicity.
  std::vector<Event> ev(raw.events().begin(), raw.events().end());
  double floor = 0.0;
  for (auto& e : ev) {
    e.x_minus = std::max(e.x_minus, floor);
    e.x = std::max(e.x, e.x_minus);
    e.x_plus = std::max(e.x_plus, e.x);
    floor = e.x_plus;
  }
  return IncreasingPath(LadlagPath(std::move(ev), raw.horizon(), raw.rule()));
}

double integrate_against_path(const BilinearIntegrand& f, const LadlagPath& X,
                              double t) {
  return value_at(integral_path(f, X), t, Side::at);
}

LadlagPath y_process(const LadlagPath& N, const IncreasingPath& A) {
  require_same_horizon(N, A.path(), "y_process");
  const auto times = skeleton_of({&N, &A.path()}, {}, N.horizon());
  PathCursor nc(N), ac(A.path());
  std::vector<Event> out;
  out.reserve(times.size());
  RunningSum y;
  Event pn{}, pa{};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Event n = nc.sample(times[i]);
    const Event a = ac.sample(times[i]);
    if (i > 0) {
      double dn = n.x_minus - pn.x_plus;
      if (dn != 0.0) y.add(dn * mean_inverse(pa.x_plus, a.x_minus));
    }
    Event e{times[i], y.value(), 0.0, 0.0};
    if (n.delta() != 0.0) y.add(n.delta() / (1.0 + a.x));
    e.x = y.value();
    if (n.delta_plus() != 0.0) y.add(n.delta_plus() / (1.0 + a.x_plus));
    e.x_plus = y.value();
    if (i == 0) e.x_minus = e.x = 0.0;
    out.push_back(e);
    pn = n;
    pa = a;
  }
  return LadlagPath(std::move(out), N.horizon(), N.rule());
}

LadlagPath invert_y_process(const LadlagPath& Y, const IncreasingPath& A) {
  require_same_horizon(Y, A.path(), "invert_y_process");
  const auto times = skeleton_of({&Y, &A.path()}, {}, Y.horizon());
  PathCursor yc(Y), ac(A.path());
  std::vector<Event> out;
  out.reserve(times.size());
  RunningSum n;
  Event py{}, pa{};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Event y = yc.sample(times[i]);
    const Event a = ac.sample(times[i]);
    if (i > 0) {
      double dy = y.x_minus - py.x_plus;
      if (dy != 0.0) n.add(dy / mean_inverse(pa.x_plus, a.x_minus));
    }
    Event e{times[i], n.value(), 0.0, 0.0};
    if (y.delta() != 0.0) n.add(y.delta() * (1.0 + a.x));
    e.x = n.value();
    if (y.delta_plus() != 0.0) n.add(y.delta_plus() * (1.0 + a.x_plus));
    e.x_plus = n.value();
    if (i == 0) e.x_minus = e.x = 0.0;
    out.push_back(e);
    py = y;
    pa = a;
  }
  return LadlagPath(std::move(out), Y.horizon(), Y.rule());
}

IncreasingPath wiener_y_bracket(double sigma, const IncreasingPath& A) {
  if (sigma < 0.0) throw DomainError("wiener_y_bracket: sigma must be nonnegative");
  const LadlagPath closed = close_at_horizon(A.path());
  const auto ev = closed.events();
  std::vector<Event> out;
  out.reserve(ev.size());
  RunningSum b;
  const double s2 = sigma * sigma;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i > 0) {
      double a0 = ev[i - 1].x_plus;
      double a1 = ev[i].x_minus;
      b.add(s2 * (ev[i].t - ev[i - 1].t) / ((1.0 + a0) * (1.0 + a1)));
    }
    double v = b.value();
    out.push_back(Event{ev[i].t, v, v, v});
  }
  return IncreasingPath(LadlagPath(std::move(out), closed.horizon(), BetweenRule::linear));
}

IncreasingPath d_process(const LadlagPath& Y, const IncreasingPath& bracket_c) {
  require_same_horizon(Y, bracket_c.path(), "d_process");
  const auto times = skeleton_of({&Y, &bracket_c.path()}, {}, Y.horizon());
  PathCursor yc(Y), bc(bracket_c.path());
  std::vector<Event> out;
  out.reserve(times.size());
  RunningSum d;
  Event pb{};
  auto term = [](double j) { return j * j / (1.0 + std::abs(j)); };
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Event y = yc.sample(times[i]);
    const Event b = bc.sample(times[i]);
    if (i > 0 && b.x_minus != pb.x_plus) d.add(b.x_minus - pb.x_plus);
    Event e{times[i], d.value(), 0.0, 0.0};
    if (b.delta() != 0.0) d.add(b.delta());
    if (i > 0 && y.delta() != 0.0) d.add(term(y.delta()));
    e.x = d.value();
    if (b.delta_plus() != 0.0) d.add(b.delta_plus());
    if (y.delta_plus() != 0.0) d.add(term(y.delta_plus()));
    e.x_plus = d.value();
    out.push_back(e);
    pb = b;
  }
  return IncreasingPath(
      LadlagPath(std::move(out), Y.horizon(), bracket_c.path().rule()));
}

std::vector<NormalizedPoint> kronecker_diagnostic(const LadlagPath& N,
                                                  const IncreasingPath& A) {
  require_same_horizon(N, A.path(), "kronecker_diagnostic");
  const auto times = skeleton_of({&N, &A.path()}, {}, N.horizon());
  PathCursor nc(N), ac(A.path());
  std::vector<NormalizedPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    const Event n = nc.sample(t);
    const Event a = ac.sample(t);
    if (a.x > 0.0) out.push_back({t, n.x / a.x});
  }
  return out;
}

std::optional<double> kronecker_tail_max(const LadlagPath& N,
                                         const IncreasingPath& A, double t_from) {
  require_same_horizon(N, A.path(), "kronecker_tail_max");
  if (!(t_from >= 0.0 && t_from <= N.horizon()))
    throw DomainError("kronecker_tail_max: tail start outside [0, horizon]");
  const double start[] = {t_from};
  const auto times = skeleton_of({&N, &A.path()}, start, N.horizon());
  PathCursor nc(N), ac(A.path());
  double best = 0.0;
  for (double t : times) {
    if (t < t_from) continue;
    const Event n = nc.sample(t);
    const Event a = ac.sample(t);
    const double ns[] = {n.x_minus, n.x, n.x_plus};
    const double as[] = {a.x_minus, a.x, a.x_plus};
    for (int k = (t == t_from ? 1 : 0); k < 3; ++k) {
      if (!(as[k] > 0.0)) return std::nullopt;
      best = std::max(best, std::abs(ns[k] / as[k]));
    }
  }
  return best;
}

}  // namespace optreg
