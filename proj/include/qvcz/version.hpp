#pragma once

namespace qvcz {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qvcz
