#pragma once

namespace lpp {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace lpp
