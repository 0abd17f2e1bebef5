#pragma once

namespace polelab {

inline constexpr const char* k_version = "polelab 0.1.0";

}  // namespace polelab
