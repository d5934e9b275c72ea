#pragma once

namespace fpprace {

inline constexpr const char* fpprace_version = "0.1.0";

} // namespace fpprace
