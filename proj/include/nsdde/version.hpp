#pragma once

namespace nsdde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nsdde
