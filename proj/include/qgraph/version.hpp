#pragma once

namespace qgraph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qgraph
