#pragma once

namespace hierenv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hierenv
