#pragma once

#include <string>
#include <vector>

namespace pxshrink::cli {

// Parses and runs one invocation. Returns 0 on success, 1 on usage errors,
// 2 on runtime failures (including diverged chains).
int dispatch(const std::vector<std::string>& args);

} // namespace pxshrink::cli
