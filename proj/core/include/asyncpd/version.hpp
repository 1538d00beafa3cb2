#pragma once

namespace asyncpd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace asyncpd
