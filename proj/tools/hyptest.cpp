#include "cli.hpp"

int main(int argc, char** argv) { return hyptest::cli::run(argc, argv); }
