// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "covmap/error.hpp"
#include "covmap/linalg.hpp"
#include "covmap/rng.hpp"
#include "covmap/operators.hpp"
#include "covmap/covmap2.hpp"
#include "covmap/classify.hpp"
#include "covmap/norms.hpp"
#include "covmap/multicopy.hpp"
#include "covmap/twirl.hpp"
#include "covmap/json_io.hpp"
