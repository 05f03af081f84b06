#include <string>
#include <vector>

#include "segmenter/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return segmenter::run_cli(args);
}
