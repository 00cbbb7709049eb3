#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "aquanet/errors.hpp"
#include "aquanet/hydraulics.hpp"
#include "aquanet/scenario.hpp"
#include "text.hpp"

namespace aquanet::detail {

// Quality-step counts per hydraulic step, truncated at the run duration.
struct RunPlan {
  double dt = 0.0;
  double end = 0.0;
  std::vector<std::size_t> quality_steps;  // per hydraulic step; 0 past the end
};

inline RunPlan plan_run(const HydraulicSchedule& schedule, const Scenario& scenario) {
  RunPlan plan;
  plan.dt = scenario.sim.dt;
  check_step_divisibility(schedule, plan.dt);
  plan.end = scenario.sim.duration.value_or(schedule.end_time());
  if (plan.end > schedule.end_time() + 1e-9) {
    throw Error(ErrorCategory::Hydraulics, "duration " + format_double(plan.end) +
                                               " s runs past the end of the hydraulic schedule (" +
                                               format_double(schedule.end_time()) + " s)");
  }
  const double total = plan.end / plan.dt;
  if (std::abs(total - std::round(total)) > 1e-9 * std::max(1.0, total)) {
    throw Error(ErrorCategory::Usage, "duration must be a whole number of quality steps");
  }
  for (const auto& step : schedule.steps) {
    const double span = std::min(step.start + step.duration, plan.end) - step.start;
    plan.quality_steps.push_back(span > 0.0 ? static_cast<std::size_t>(std::llround(span / plan.dt)) : 0);
  }
  return plan;
}

}  // namespace aquanet::detail
