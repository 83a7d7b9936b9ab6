#include "cli.hpp"

int main(int argc, char** argv) { return hpsurf::cli::run(std::vector<std::string>(argv, argv + argc)); }
