#pragma once

namespace nbspec {

inline constexpr const char* version = "0.1.0";

}
