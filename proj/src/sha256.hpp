// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace lcr {

/// FIPS 180-4 SHA-256, returned as a 64-char lowercase hex digest.
std::string sha256_hex(std::string_view data);

}  // namespace lcr
