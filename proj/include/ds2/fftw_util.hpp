#pragma once

#include <fftw3.h>

#include <memory>
#include <mutex>

namespace ds2::detail {

// FFTW planning is not thread safe; execution with new-array calls is.
std::mutex& fftw_planner_mutex();

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    if (p) fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace ds2::detail
