#include <string>
#include <vector>

#include "kgmv/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return kgmv::run_cli(args);
}
