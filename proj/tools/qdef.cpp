#include "qdef/cli.hpp"

int main(int argc, char** argv) {
    return qdef::cli::run(std::vector<std::string>(argv, argv + argc));
}
