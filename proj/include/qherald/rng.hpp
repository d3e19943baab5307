// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_RNG_HPP_
#define QHERALD_RNG_HPP_

#include <cstdint>
#include <random>

namespace qherald {

// Deterministic random stream. All stochastic draws in a run come from one
// instance, consumed strictly in event order, so a (scenario, seed) pair
// pins every outcome.
//
// Bernoulli draws avoid std::bernoulli_distribution: its draw count is
// implementation-defined, which would let the stream diverge between
// standard libraries. One 53-bit uniform per trial is portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision. Consumes exactly one
  // engine step.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // True with probability p. p outside [0, 1] is clamped by comparison:
  // p <= 0 never fires, p >= 1 always fires. Consumes exactly one engine
  // step regardless of p.
  bool bernoulli(double p) { return next_unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qherald

#endif  // QHERALD_RNG_HPP_
