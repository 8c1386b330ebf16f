#include "optreg/ladlag.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "optreg/errors.hpp"
#include "optreg/text.hpp"

namespace optreg {

namespace {

bool finite(const Event& e) {
  return std::isfinite(e.t) && std::isfinite(e.x_minus) && std::isfinite(e.x) &&
         std::isfinite(e.x_plus);
}

// Value strictly between events `left` and `right`.
double interpolate(const Event& left, const Event& right, BetweenRule rule,
                   double t) {
  if (rule == BetweenRule::piecewise_constant) return left.x_plus;
  double w = (t - left.t) / (right.t - left.t);
  return left.x_plus + (right.x_minus - left.x_plus) * w;
}

double tail_value(const Event& last, double slope, double t) {
  return slope == 0.0 ? last.x_plus : last.x_plus + slope * (t - last.t);
}

const char* rule_name(BetweenRule r) {
  return r == BetweenRule::linear ? "linear" : "constant";
}

}  // namespace

LadlagPath::LadlagPath(std::vector<Event> events, double horizon,
                       BetweenRule rule, double tail_slope)
    : events_(std::move(events)),
      horizon_(horizon),
      rule_(rule),
      tail_slope_(tail_slope) {
  if (events_.empty()) throw DomainError("path needs at least one event");
  if (!(std::isfinite(horizon_) && horizon_ >= 0.0))
    throw DomainError("horizon must be finite and nonnegative");
  if (!std::isfinite(tail_slope_)) throw DomainError("tail slope must be finite");
  if (rule_ == BetweenRule::piecewise_constant && tail_slope_ != 0.0)
    throw DomainError("piecewise-constant path cannot have a tail slope");
  const Event& first = events_.front();
  if (first.t != 0.0) throw DomainError("first event must sit at t = 0");
  if (first.x_minus != first.x)
    throw DomainError("no jump is allowed from before time 0");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (!finite(e))
      throw DomainError("non-finite event value at t = " + format_real(e.t));
    if (e.t > horizon_)
      throw DomainError("event at t = " + format_real(e.t) + " beyond horizon");
    if (i == 0) continue;
    const Event& prev = events_[i - 1];
    if (!(e.t > prev.t))
      throw DomainError("event times must be strictly increasing at t = " +
                        format_real(e.t));
    if (rule_ == BetweenRule::piecewise_constant && prev.x_plus != e.x_minus)
      throw DomainError("constant rule broken between t = " +
                        format_real(prev.t) + " and t = " + format_real(e.t));
  }
}

LadlagPath LadlagPath::zero(double horizon) {
  return LadlagPath({Event{}}, horizon);
}

LadlagPath LadlagPath::line(double horizon, double slope) {
  return LadlagPath({Event{}}, horizon, BetweenRule::linear, slope);
}

std::vector<double> LadlagPath::times() const {
  std::vector<double> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.t);
  return out;
}

IncreasingPath::IncreasingPath(LadlagPath path) : path_(std::move(path)) {
  const auto ev = path_.events();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Event& e = ev[i];
    if (!(e.x_minus <= e.x && e.x <= e.x_plus))
      throw DomainError("increasing path decreases across t = " +
                        format_real(e.t));
    if (i > 0 && ev[i - 1].x_plus > e.x_minus)
      throw DomainError("increasing path decreases before t = " +
                        format_real(e.t));
  }
  if (path_.tail_slope() < 0.0)
    throw DomainError("increasing path has a negative tail slope");
}

double value_at(const LadlagPath& path, double t, Side side) {
  if (!(t >= 0.0 && t <= path.horizon()))
    throw DomainError("time " + format_real(t) + " outside [0, " +
                      format_real(path.horizon()) + "]");
  const auto ev = path.events();
  auto it = std::upper_bound(ev.begin(), ev.end(), t,
                             [](double v, const Event& e) { return v < e.t; });
  const Event& prev = *(it - 1);
  if (prev.t == t) {
    switch (side) {
      case Side::left: return prev.x_minus;
      case Side::at: return prev.x;
      case Side::right: return prev.x_plus;
    }
  }
  if (it == ev.end()) return tail_value(prev, path.tail_slope(), t);
  return interpolate(prev, *it, path.rule(), t);
}

Event PathCursor::sample(double t) {
  const auto ev = path_->events();
  while (next_ < ev.size() && ev[next_].t <= t) ++next_;
  const Event& prev = ev[next_ - 1];
  if (prev.t == t) return prev;
  double v = next_ < ev.size() ? interpolate(prev, ev[next_], path_->rule(), t)
                               : tail_value(prev, path_->tail_slope(), t);
  return Event{t, v, v, v};
}

std::vector<Jump> jumps(const LadlagPath& path) {
  std::vector<Jump> out;
  for (const auto& e : path.events()) {
    double d = e.delta();
    double dp = e.delta_plus();
    if (d != 0.0 || dp != 0.0) out.push_back(Jump{e.t, d, dp});
  }
  return out;
}

std::vector<double> union_times(std::span<const LadlagPath* const> paths,
                                std::span<const double> extra) {
  std::vector<double> out(extra.begin(), extra.end());
  if (!std::is_sorted(out.begin(), out.end())) std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (const LadlagPath* p : paths) {
    merged.clear();
    merged.reserve(out.size() + p->size());
    const auto ev = p->events();
    auto a = out.begin();
    std::size_t b = 0;
    while (a != out.end() || b < ev.size()) {
      if (b == ev.size() || (a != out.end() && *a < ev[b].t)) {
        merged.push_back(*a++);
      } else {
        merged.push_back(ev[b++].t);
      }
    }
    merged.swap(out);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LadlagPath refine(const LadlagPath& path, std::span<const double> times) {
  const LadlagPath* self[] = {&path};
  std::vector<double> skeleton = union_times(self, times);
  std::vector<Event> events;
  events.reserve(skeleton.size());
  PathCursor cursor(path);
  for (double t : skeleton) {
    if (t < 0.0 || t > path.horizon()) continue;
    events.push_back(cursor.sample(t));
  }
  return LadlagPath(std::move(events), path.horizon(), path.rule(),
                    path.tail_slope());
}

LadlagPath close_at_horizon(const LadlagPath& path) {
  if (path.back().t == path.horizon()) return path;
  const double t[] = {path.horizon()};
  return refine(path, t);
}

LadlagPath add(std::span<const LadlagPath> paths) {
  if (paths.empty()) throw DomainError("add needs at least one path");
  const double horizon = paths.front().horizon();
  std::vector<const LadlagPath*> ptrs;
  BetweenRule rule = BetweenRule::piecewise_constant;
  double tail = 0.0;
  for (const auto& p : paths) {
    if (p.horizon() != horizon) throw DomainError("add: mismatched horizons");
    if (p.rule() == BetweenRule::linear) rule = BetweenRule::linear;
    tail += p.tail_slope();
    ptrs.push_back(&p);
  }
  const std::vector<double> skeleton = union_times(ptrs);
  std::vector<PathCursor> cursors;
  cursors.reserve(paths.size());
  for (const auto& p : paths) cursors.emplace_back(p);
  std::vector<Event> events(skeleton.size());
  for (std::size_t i = 0; i < skeleton.size(); ++i) {
    Event sum{skeleton[i], 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < cursors.size(); ++k) {
      Event e = cursors[k].sample(skeleton[i]);
      if (k == 0) {
        sum.x_minus = e.x_minus;
        sum.x = e.x;
        sum.x_plus = e.x_plus;
      } else {
        sum.x_minus += e.x_minus;
        sum.x += e.x;
        sum.x_plus += e.x_plus;
      }
    }
    events[i] = sum;
  }
  return LadlagPath(std::move(events), horizon, rule, tail);
}

LadlagPath add(const LadlagPath& a, const LadlagPath& b) {
  const LadlagPath both[] = {a, b};
  return add(both);
}

IncreasingPath add(const IncreasingPath& a, const IncreasingPath& b) {
  return IncreasingPath(add(a.path(), b.path()));
}

LadlagPath scale(const LadlagPath& path, double c) {
  std::vector<Event> events(path.events().begin(), path.events().end());
  for (auto& e : events) {
    e.x_minus *= c;
    e.x *= c;
    e.x_plus *= c;
  }
  return LadlagPath(std::move(events), path.horizon(), path.rule(),
                    path.tail_slope() * c);
}

void write_csv(std::ostream& out, const LadlagPath& path) {
  const LadlagPath closed = close_at_horizon(path);
  out << "t,x_minus,x,x_plus,rule\n";
  const char* rule = rule_name(closed.rule());
  for (const auto& e : closed.events()) {
    out << format_real(e.t) << ',' << format_real(e.x_minus) << ','
        << format_real(e.x) << ',' << format_real(e.x_plus) << ',' << rule
        << '\n';
  }
}

LadlagPath read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("path CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x_minus,x,x_plus,rule")
    throw ConfigError("unexpected path CSV header: " + line);
  std::vector<Event> events;
  std::string rule_text;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cols = split_csv_line(line);
    if (cols.size() != 5) throw ConfigError("path CSV row needs 5 columns");
    if (rule_text.empty()) rule_text = cols[4];
    if (cols[4] != rule_text) throw ConfigError("path CSV mixes between-rules");
    events.push_back(Event{parse_real(cols[0]), parse_real(cols[1]),
                           parse_real(cols[2]), parse_real(cols[3])});
  }
  if (events.empty()) throw ConfigError("path CSV has no rows");
  BetweenRule rule;
  if (rule_text == "linear") {
    rule = BetweenRule::linear;
  } else if (rule_text == "constant") {
    rule = BetweenRule::piecewise_constant;
  } else {
    throw ConfigError("unknown between-rule '" + rule_text + "'");
  }
  double horizon = events.back().t;
  return LadlagPath(std::move(events), horizon, rule);
}

}  // namespace optreg
