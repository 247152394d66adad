#pragma once

namespace breathkit {

inline constexpr char kVersion[] = "0.1.0";

} // namespace breathkit
