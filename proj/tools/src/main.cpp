#include "tlearn_cli/cli.hpp"

int main(int argc, char** argv) { return tlearn::cli::cli_run(argc, argv); }
