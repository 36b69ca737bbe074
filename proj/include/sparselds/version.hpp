#pragma once

namespace sparselds {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sparselds
