// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PHYS_FIBER_HPP_
#define QHERALD_PHYS_FIBER_HPP_

#include <cmath>
#include <cstdint>
#include <optional>

namespace qherald::phys {

// One arm of fiber between a node and the midpoint. Loss is specified
// either as a direct per-photon arrival probability or as attenuation in
// dB/km; with neither, the arm is lossless.
struct FiberParams {
  std::uint64_t length_m = 0;
  std::uint64_t latency_ns_per_m = 5;
  std::optional<double> p_arrive;
  std::optional<double> attenuation_db_per_km;

  bool operator==(const FiberParams&) const = default;

  std::uint64_t propagation_ns() const { return length_m * latency_ns_per_m; }

  double arrival_probability() const {
    if (p_arrive) {
      return *p_arrive;
    }
    if (attenuation_db_per_km) {
      const double km = static_cast<double>(length_m) / 1000.0;
      return std::pow(10.0, -(*attenuation_db_per_km * km) / 10.0);
    }
    return 1.0;
  }
};

}  // namespace qherald::phys

#endif  // QHERALD_PHYS_FIBER_HPP_
