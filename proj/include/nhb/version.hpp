#pragma once

namespace nhb {

inline constexpr const char* version = "0.1.0";

}  // namespace nhb
