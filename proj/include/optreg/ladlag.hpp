#pragma once

// Finite-horizon trajectories with left and right limits at every time.
//
// A path is a strictly increasing list of events (t, x_minus, x, x_plus)
// holding X_{t-}, X_t and X_{t+}. Between consecutive events the path follows
// a declared rule: either it stays constant, or it moves linearly from the
// right limit of one event to the left limit of the next. After the last event
// the path continues with a fixed tail slope up to the horizon.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace optreg {

struct Event {
  double t = 0.0;
  double x_minus = 0.0;  // X_{t-}
  double x = 0.0;        // X_t
  double x_plus = 0.0;   // X_{t+}

  double delta() const noexcept { return x - x_minus; }
  double delta_plus() const noexcept { return x_plus - x; }
  bool operator==(const Event&) const = default;
};

enum class BetweenRule { piecewise_constant, linear };

enum class Side { left, at, right };

class LadlagPath {
 public:
  /// Validates ordering, the t = 0 start without a jump from before zero,
  /// finiteness, and (for the constant rule) that x_plus of one event equals
  /// x_minus of the next. Throws DomainError on violation.
  LadlagPath(std::vector<Event> events, double horizon,
             BetweenRule rule = BetweenRule::piecewise_constant,
             double tail_slope = 0.0);

  /// The zero path on [0, horizon].
  static LadlagPath zero(double horizon);
  /// x_t = slope * t, a single event at 0 and a linear tail.
  static LadlagPath line(double horizon, double slope);

  std::span<const Event> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  const Event& back() const { return events_.back(); }
  double horizon() const noexcept { return horizon_; }
  BetweenRule rule() const noexcept { return rule_; }
  double tail_slope() const noexcept { return tail_slope_; }

  std::vector<double> times() const;

  bool operator==(const LadlagPath&) const = default;

 private:
  std::vector<Event> events_;
  double horizon_;
  BetweenRule rule_;
  double tail_slope_;
};

/// Non-decreasing path: x_minus <= x <= x_plus at every event and no
/// decrease between events. Houses integrators and design processes.
class IncreasingPath {
 public:
  explicit IncreasingPath(LadlagPath path);

  const LadlagPath& path() const noexcept { return path_; }
  operator const LadlagPath&() const noexcept { return path_; }

  bool operator==(const IncreasingPath&) const = default;

 private:
  LadlagPath path_;
};

/// X_{t-}, X_t or X_{t+}. Throws DomainError for t outside [0, horizon].
double value_at(const LadlagPath& path, double t, Side side = Side::at);

struct Jump {
  double t;
  double delta;       // X_t - X_{t-}
  double delta_plus;  // X_{t+} - X_t
  bool operator==(const Jump&) const = default;
};

std::vector<Jump> jumps(const LadlagPath& path);

/// Sorted union of event times of all paths, plus any extra times.
std::vector<double> union_times(std::span<const LadlagPath* const> paths,
                                std::span<const double> extra = {});

/// Inserts continuity events (v, v, v) at the given times that lie in
/// [0, horizon]; existing events are kept bit-for-bit.
LadlagPath refine(const LadlagPath& path, std::span<const double> times);

/// Refines onto own times plus the horizon so the last event sits at T.
LadlagPath close_at_horizon(const LadlagPath& path);

/// Pointwise sum on the union skeleton. Operands are summed left to right
/// within each event (and each of the three sides); event order is ascending
/// in t. Throws DomainError on mismatched horizons or an empty operand list.
LadlagPath add(std::span<const LadlagPath> paths);
LadlagPath add(const LadlagPath& a, const LadlagPath& b);
IncreasingPath add(const IncreasingPath& a, const IncreasingPath& b);

LadlagPath scale(const LadlagPath& path, double c);

/// Forward-only sampler returning the three values of a path at increasing
/// query times in amortized O(1).
class PathCursor {
 public:
  explicit PathCursor(const LadlagPath& path) : path_(&path) {}
  /// Query times must be non-decreasing across calls.
  Event sample(double t);

 private:
  const LadlagPath* path_;
  std::size_t next_ = 0;  // first event with time > last query
};

/// CSV with header `t,x_minus,x,x_plus,rule`; the path is closed at its
/// horizon first so the last row carries t = T.
void write_csv(std::ostream& out, const LadlagPath& path);
LadlagPath read_csv(std::istream& in);

}  // namespace optreg
