#pragma once

#include <cmath>
#include <random>

namespace starmd {

template <class Rng>
Vector sample_ball(Rng& rng, VectorRef center, double radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const Index d = center.size();
  Vector dir(d);
  double n = 0.0;
  while (n == 0.0) {
    for (Index i = 0; i < d; ++i) dir[i] = normal(rng);
    n = dir.norm();
  }
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(d));
  return center + (r / n) * dir;
}

}  // namespace starmd
