// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace dmdn {

/// Mirror index into [0, n) without repeating the edge sample
/// (-1 -> 1, n -> n-2). Preserves index parity, so Bayer sites map onto
/// sites of the same color. Handles arbitrarily far excursions.
constexpr std::ptrdiff_t mirror_index(std::ptrdiff_t i, std::ptrdiff_t n) noexcept {
    if (n == 1) return 0;
    const std::ptrdiff_t period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

}  // namespace dmdn
