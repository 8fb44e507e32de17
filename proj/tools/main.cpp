#include <string>
#include <vector>

#include "pxshrink/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pxshrink::cli::dispatch(args);
}
