#pragma once

#include <string>
#include <string_view>

namespace finsight {

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

// Case-insensitive comparison after trimming both sides.
bool equals_normalized(std::string_view a, std::string_view b);

}  // namespace finsight
