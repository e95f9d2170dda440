// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace vhp {
inline constexpr const char* kVersion = "0.1.0";
}
