#pragma once

namespace funcito {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace funcito
