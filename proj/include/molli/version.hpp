#pragma once

namespace molli {
inline constexpr const char* kVersion = "0.1.0";
}
