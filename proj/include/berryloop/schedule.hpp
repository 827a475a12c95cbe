#pragma once

// Time-reversed cyclic loop: forward in time for rho in [0, pi], backward in
// time for rho in [pi, 2 pi]. Positions along the loop are tracked by a
// monotone clock s in [0, T]; physical time is s on the first half and T - s
// on the second, so t starts and ends at 0 while rho = 2 pi s / T.

namespace berryloop {

enum class Half { forward, backward };

struct LoopSchedule {
  double period = 0.0;    // T
  double dt_max = 0.0;    // cap on |dt| for adaptive stepping
  double fixed_dt = 0.0;  // > 0 disables adaptive stepping

  double boundary() const { return 0.5 * period; }
  Half half_at(double clock) const { return clock < boundary() ? Half::forward : Half::backward; }
  double time_at(double clock) const { return clock <= boundary() ? clock : period - clock; }
  double rho_at(double clock) const;
  /// rho as a function of physical time within a given half.
  double rho_of_time(double t, Half half) const;
  double sign(Half half) const { return half == Half::forward ? 1.0 : -1.0; }
};

}  // namespace berryloop
