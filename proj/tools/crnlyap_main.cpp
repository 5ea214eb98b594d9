#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"mass-action reaction network analysis"};
  CLI11_PARSE(app, argc, argv);
  return 0;
}
