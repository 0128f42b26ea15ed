#pragma once

#include <string>
#include <string_view>

namespace spiderlab {

/// Porter (1980) stem of a lowercase ASCII word. Words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

} // namespace spiderlab
