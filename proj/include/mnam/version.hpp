#pragma once

namespace mnam {

inline constexpr const char* kVersion = "0.1.0";

}
