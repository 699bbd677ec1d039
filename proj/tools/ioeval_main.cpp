#include <string>
#include <vector>

#include "ioeval/cli.hpp"

int main(int argc, char** argv) {
  return ioeval::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
