#pragma once

#include <string>

namespace pxshrink {

// %.17g, enough digits for an exact double round trip
std::string format_g17(double x);

// Write to a temp file next to `path`, then rename into place, so readers
// never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace pxshrink
