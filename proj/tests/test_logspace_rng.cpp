#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "aois/logspace.hpp"
#include "aois/rng.hpp"
#include "doctest.h"

using namespace aois;

TEST_CASE("log-domain add matches linear arithmetic") {
  CHECK(logspace::add(std::log(0.25), std::log(0.5)) == doctest::Approx(std::log(0.75)));
  CHECK(logspace::add(logspace::kLogZero, std::log(0.3)) == doctest::Approx(std::log(0.3)));
  CHECK(logspace::is_zero(logspace::add(logspace::kLogZero, logspace::kLogZero)));
  // far-apart magnitudes stay finite
  const double tiny = -1e6, big = -1.0;
  CHECK(logspace::add(tiny, big) == doctest::Approx(big));
}

TEST_CASE("accumulator: single term is bit-exact, zeros count in the mean") {
  logspace::Accumulator acc;
  acc.add(-1234.5);
  CHECK(acc.log_sum() == -1234.5);

  logspace::Accumulator mean;
  mean.add(std::log(0.5));
  mean.add(logspace::kLogZero);  // a zero-weight term
  CHECK(mean.terms() == 2);
  CHECK(mean.log_mean() == doctest::Approx(std::log(0.25)));

  logspace::Accumulator empty;
  CHECK(logspace::is_zero(empty.log_mean()));
}

TEST_CASE("accumulator agrees with direct summation across magnitudes") {
  logspace::Accumulator acc;
  double direct = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double p = 0.001 * (i + 1);
    acc.add(std::log(p));
    direct += p;
  }
  CHECK(acc.log_sum() == doctest::Approx(std::log(direct)).epsilon(1e-13));
}

TEST_CASE("rng: identical seeds reproduce, streams and seeds differ") {
  Philox a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool stream_differs = false, seed_differs = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform();
    CHECK(va == b.uniform());
    if (va != c.uniform()) stream_differs = true;
    if (va != d.uniform()) seed_differs = true;
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(stream_differs);
  CHECK(seed_differs);
  CHECK(a.draws() == 100);
}

TEST_CASE("rng: coarse uniformity") {
  Philox rng(7, 3);
  const int n = 100000;
  double sum = 0.0;
  int low = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    sum += u;
    if (u < 0.5) ++low;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  // 5 sigma band around n/2 for a fair coin
  CHECK(std::abs(low - n / 2) < 5 * std::sqrt(n / 4.0));
}
