#pragma once

namespace sst {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sst
