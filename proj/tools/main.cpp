#include <string>
#include <vector>

#include "restobench/cli.hpp"

int main(int argc, char** argv) {
    return restobench::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
