#pragma once

namespace curvetree {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace curvetree
