#pragma once

namespace lacc {

inline constexpr const char* kToolVersion = "1.0.0";

}
