#include <string>
#include <vector>

#include "shocklab/lab.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return shocklab::cli_dispatch(args);
}
