// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "prunelab/schedule.hpp"

using namespace prunelab;

namespace {

TrainSchedule paper_schedule() {
  TrainSchedule s;
  s.total_epochs = 75;
  s.warmup_epochs = 5;
  s.peak_lr = 6e-4;
  return s;
}

}  // namespace

TEST_CASE("warmup ramps from zero to the peak") {
  const TrainSchedule s = paper_schedule();
  CHECK(lr_at(s, 0.0) == 0.0);
  CHECK(lr_at(s, 5.0) == doctest::Approx(6e-4).epsilon(1e-15));
  CHECK(lr_at(s, 2.5) == doctest::Approx(3e-4).epsilon(1e-12));
}

TEST_CASE("cosine decay hits zero at the end and half-peak mid-span") {
  const TrainSchedule s = paper_schedule();
  CHECK(std::fabs(lr_at(s, 75.0)) < 1e-12);
  const double expected =
      6e-4 * 0.5 * (1.0 + std::cos(std::numbers::pi * 35.0 / 70.0));
  CHECK(lr_at(s, 40.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(lr_at(s, 40.0) == doctest::Approx(3e-4).epsilon(1e-10));
}

TEST_CASE("continuous at the warmup boundary") {
  const TrainSchedule s = paper_schedule();
  CHECK(lr_at(s, 5.0 - 1e-9) == doctest::Approx(lr_at(s, 5.0)).epsilon(1e-6));
}

TEST_CASE("monotone up on warmup, monotone down after, max at peak") {
  const TrainSchedule s = paper_schedule();
  double prev = -1.0;
  double max_seen = 0.0;
  for (double e = 0.0; e <= 5.0; e += 0.25) {
    const double lr = lr_at(s, e);
    CHECK(lr >= prev);
    prev = lr;
    max_seen = std::max(max_seen, lr);
  }
  prev = 1.0;
  for (double e = 5.0; e <= 75.0; e += 0.5) {
    const double lr = lr_at(s, e);
    CHECK(lr <= prev + 1e-18);
    prev = lr;
    max_seen = std::max(max_seen, lr);
  }
  CHECK(max_seen == doctest::Approx(s.peak_lr));
}

TEST_CASE("epochs outside the schedule are rejected") {
  const TrainSchedule s = paper_schedule();
  CHECK_THROWS_AS((void)lr_at(s, -0.1), std::out_of_range);
  CHECK_THROWS_AS((void)lr_at(s, 75.5), std::out_of_range);
}

TEST_CASE("constant schedule ignores the epoch") {
  TrainSchedule s = paper_schedule();
  s.kind = ScheduleKind::Constant;
  s.peak_lr = 1e-5;
  CHECK(lr_at(s, 0.0) == 1e-5);
  CHECK(lr_at(s, 30.0) == 1e-5);
}

TEST_CASE("schedule validation names the offending field") {
  TrainSchedule s = paper_schedule();
  s.warmup_epochs = 80;
  CHECK_THROWS_WITH_AS(validate(s),
                       "schedule.warmup_epochs: must be < total_epochs",
                       std::invalid_argument);
}
