#pragma once

namespace dkm {

inline constexpr const char* kToolVersion = "dkm 0.1.0";

} // namespace dkm
