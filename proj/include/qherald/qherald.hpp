// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: the whole library in one include.

#ifndef QHERALD_QHERALD_HPP_
#define QHERALD_QHERALD_HPP_

#include "qherald/bytes.hpp"
#include "qherald/config/control.hpp"
#include "qherald/config/scenario.hpp"
#include "qherald/config/timing.hpp"
#include "qherald/errors.hpp"
#include "qherald/event_engine.hpp"
#include "qherald/harness/metrics.hpp"
#include "qherald/harness/simulation.hpp"
#include "qherald/mhp/programs.hpp"
#include "qherald/phys/detector.hpp"
#include "qherald/phys/fiber.hpp"
#include "qherald/phys/link.hpp"
#include "qherald/phys/qubits.hpp"
#include "qherald/pipeline/device.hpp"
#include "qherald/pipeline/document.hpp"
#include "qherald/pipeline/ir.hpp"
#include "qherald/pipeline/validate.hpp"
#include "qherald/rng.hpp"
#include "qherald/toml_lite.hpp"
#include "qherald/wire.hpp"

#endif  // QHERALD_QHERALD_HPP_
