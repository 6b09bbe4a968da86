#pragma once

#include <string>

namespace relay {

// Shortest decimal form with up to `digits` significant digits.
// Infinities render as "inf"/"-inf".
std::string format_sig(double value, int digits = 12);

}  // namespace relay
