#pragma once

#include <string>

namespace ogb {

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Round-trip-exact decimal form of a double (shortest representation).
std::string format_double(double v);

}  // namespace ogb
