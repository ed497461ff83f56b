#include "rollpass/cli.hpp"

int main(int argc, char** argv) {
  return rollpass::cli::run(argc, argv);
}
