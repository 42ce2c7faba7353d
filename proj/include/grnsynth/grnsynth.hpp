// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "grnsynth/catalog.hpp"
#include "grnsynth/constraints.hpp"
#include "grnsynth/error.hpp"
#include "grnsynth/json_io.hpp"
#include "grnsynth/logic.hpp"
#include "grnsynth/model.hpp"
#include "grnsynth/mutation.hpp"
#include "grnsynth/rational.hpp"
#include "grnsynth/robustness.hpp"
#include "grnsynth/synth.hpp"
