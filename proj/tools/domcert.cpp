#include <string>
#include <vector>

#include "domcert/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return domcert::cli::run(args);
}
