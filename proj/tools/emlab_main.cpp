#include <vector>

#include "emlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return emlab::run_cli(args);
}
