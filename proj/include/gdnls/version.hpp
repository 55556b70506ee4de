#pragma once

namespace gdnls {
inline constexpr const char* kVersion = "0.1.0";
}
