// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_PHYS_DETECTOR_HPP_
#define QHERALD_PHYS_DETECTOR_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "qherald/event_engine.hpp"
#include "qherald/mhp/programs.hpp"
#include "qherald/rng.hpp"
#include "qherald/wire.hpp"

namespace qherald::phys {

struct DetectorParams {
  double p_bsm = 1.0;
  std::uint64_t bin_width_ns = 0;
  std::uint64_t report_latency_ns = 0;
  bool operator==(const DetectorParams&) const = default;
};

// Time-binned two-photon interference measurement. Photons land in bins of
// fixed width; when a bin closes, a swap verdict is drawn only if exactly
// one photon from each side is present.
class MidpointDetector {
 public:
  MidpointDetector(std::uint16_t det_id, DetectorParams params)
      : det_id_(det_id), params_(params) {}

  std::uint16_t det_id() const { return det_id_; }
  const DetectorParams& params() const { return params_; }

  struct PhotonArrival {
    int side = 0;  // 0: node a's arm, 1: node b's arm
    std::uint16_t slot = 0;
    std::uint32_t cycle = 0;
    std::uint16_t attempt_params = 0;
    SimTime at = 0;
  };

  void photon_arrived(const PhotonArrival& arrival) {
    const std::uint64_t bin = mhp::bin_of(arrival.at, params_.bin_width_ns);
    auto& bucket = bins_[bin];
    bucket.push_back(arrival);
    if (bins_.size() > max_open_bins_) {
      max_open_bins_ = bins_.size();
    }
  }

  struct BinVerdict {
    std::uint8_t outcome = kOutcomeFail;  // detector outcome: 0 or 1
    // Valid when exactly one photon per side arrived, regardless of the
    // swap draw; identifies the attempt the verdict is about.
    bool paired = false;
    PhotonArrival a;
    PhotonArrival b;
  };

  // Closes `bin`: consumes its arrivals (and anything older, which can no
  // longer pair) and draws the swap verdict when a valid pair is present.
  // The draw is conditional on a pair so the random stream only advances
  // when a measurement physically happens.
  BinVerdict close_bin(std::uint64_t bin, Rng& rng) {
    ++closes_;
    BinVerdict verdict;
    auto it = bins_.find(bin);
    if (it != bins_.end()) {
      int count_a = 0;
      int count_b = 0;
      for (const auto& arrival : it->second) {
        (arrival.side == 0 ? count_a : count_b) += 1;
        (arrival.side == 0 ? verdict.a : verdict.b) = arrival;
      }
      if (count_a == 1 && count_b == 1) {
        verdict.paired = true;
        verdict.outcome =
            rng.bernoulli(params_.p_bsm) ? kOutcomeSuccess : kOutcomeFail;
      }
    }
    bins_.erase(bins_.begin(), bins_.upper_bound(bin));
    return verdict;
  }

  std::uint64_t closes() const { return closes_; }
  std::size_t open_bins() const { return bins_.size(); }
  std::size_t max_open_bins() const { return max_open_bins_; }

 private:
  std::uint16_t det_id_;
  DetectorParams params_;
  std::map<std::uint64_t, std::vector<PhotonArrival>> bins_;
  std::size_t max_open_bins_ = 0;
  std::uint64_t closes_ = 0;
};

}  // namespace qherald::phys

#endif  // QHERALD_PHYS_DETECTOR_HPP_
