#pragma once

#include <string>

namespace pebc {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace pebc
