#include "activelab/cli.hpp"

int main(int argc, char** argv) { return activelab::cli_main(argc, argv); }
