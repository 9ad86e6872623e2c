#include "gm/cli.hpp"

int main(int argc, char** argv) {
  return gm::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
