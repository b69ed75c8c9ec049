#pragma once

namespace hdsched {

inline constexpr const char* kVersion = "0.1.0";

}
