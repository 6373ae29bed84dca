#pragma once

namespace mstage {
inline constexpr const char* kVersion = "mstage 0.1.0";
}
