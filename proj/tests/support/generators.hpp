#pragma once

// Seeded generators for property-style tests. Each test owns its own Gen so
// failures reproduce from the seed printed by the assertion message.

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "degenwave/weight_model.hpp"

namespace degenwave::testing {

struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>()(rng); }

  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // alpha across the admissible range, epsilon either 0 or in (0, L/4).
  WeightParams params(int dimension = 2, bool allow_zero_eps = true) {
    WeightParams p;
    p.dimension = dimension;
    p.alpha = uniform(kAlphaMin, kAlphaMax);
    p.epsilon = (allow_zero_eps && integer(0, 3) == 0) ? 0.0 : uniform(0.01, 0.24);
    return p;
  }

  std::mt19937_64 rng;
};

}  // namespace degenwave::testing
