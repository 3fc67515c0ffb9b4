#include "cvlab_cli/cli.hpp"

int main(int argc, char** argv) { return cvlab::cli::cli_main(argc, argv); }
