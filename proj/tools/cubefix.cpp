#include "cubefix/cli.hpp"

int main(int argc, char** argv) { return cubefix::cli::run_cli(argc, argv); }
