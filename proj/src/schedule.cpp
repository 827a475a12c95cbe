#include "berryloop/schedule.hpp"

#include <numbers>

namespace berryloop {

double LoopSchedule::rho_at(double clock) const { return 2.0 * std::numbers::pi * clock / period; }

double LoopSchedule::rho_of_time(double t, Half half) const {
  const double clock = half == Half::forward ? t : period - t;
  return rho_at(clock);
}

}  // namespace berryloop
