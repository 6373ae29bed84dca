#include <doctest.h>

#include <cmath>

#include "mstage/rng.hpp"
#include "mstage/stats.hpp"

using namespace mstage;

TEST_CASE("derive_stream: identical triples give identical draws") {
  Rng a = derive_stream(42, "exp-a", 7);
  Rng b = derive_stream(42, "exp-a", 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive_stream: replication 0 vs 1 differ") {
  Rng a = derive_stream(42, "exp-a", 0);
  Rng b = derive_stream(42, "exp-a", 1);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);
}

TEST_CASE("derive_stream: experiment id separates streams") {
  Rng a = derive_stream(42, "exp-a", 3);
  Rng b = derive_stream(42, "exp-b", 3);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);
}

TEST_CASE("stream cross-correlation stays small over 1e6 draws") {
  const long n = 1000000;
  Rng a = derive_stream(9, "corr", 0);
  Rng b = derive_stream(9, "corr", 1);
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (long i = 0; i < n; ++i) {
    const double x = a.uniform01() - 0.5;
    const double y = b.uniform01() - 0.5;
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double nd = static_cast<double>(n);
  const double corr = (sab - sa * sb / nd) / std::sqrt((saa - sa * sa / nd) * (sbb - sb * sb / nd));
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("uniform01 and normal moments") {
  Rng rng(123);
  const long n = 200000;
  Eigen::ArrayXd u(n), z(n);
  for (long i = 0; i < n; ++i) {
    u[i] = rng.uniform01();
    z[i] = rng.normal();
  }
  CHECK(u.minCoeff() >= 0.0);
  CHECK(u.maxCoeff() < 1.0);
  CHECK(std::abs(u.mean() - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / static_cast<double>(n)));
  CHECK(std::abs(z.mean()) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(variance(z) - 1.0) < 0.02);
}
