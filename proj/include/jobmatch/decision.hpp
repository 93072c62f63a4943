#pragma once

#include <string_view>

namespace jobmatch {

enum class Decision { advance, reject };

inline std::string_view to_string(Decision d) { return d == Decision::advance ? "advance" : "reject"; }

}  // namespace jobmatch
