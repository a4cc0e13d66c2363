#pragma once

namespace heatinv {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace heatinv
