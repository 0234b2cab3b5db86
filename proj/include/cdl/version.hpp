#pragma once

namespace cdl {

inline constexpr const char* version_string = "0.1.0";
inline constexpr const char* json_schema = "cdl/1";

}  // namespace cdl
