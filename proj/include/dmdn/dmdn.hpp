// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dmdn/analysis.hpp"
#include "dmdn/cfa.hpp"
#include "dmdn/core/border.hpp"
#include "dmdn/core/color.hpp"
#include "dmdn/core/error.hpp"
#include "dmdn/core/image.hpp"
#include "dmdn/core/parallel.hpp"
#include "dmdn/demosaic.hpp"
#include "dmdn/denoise.hpp"
#include "dmdn/noise.hpp"
#include "dmdn/schemes.hpp"
