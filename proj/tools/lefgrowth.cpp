#include <string>
#include <vector>

#include <lefgrowth/cli.hpp>

int main(int argc, char** argv) {
  return lefg::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
