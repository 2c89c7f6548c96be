#include <string>
#include <vector>

#include "dyntex/cli/commands.hpp"

int main(int argc, char** argv) { return dyntex::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc)); }
