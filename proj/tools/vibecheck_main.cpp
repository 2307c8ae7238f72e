#include "vibecheck/cli.hpp"

int main(int argc, char** argv) { return vibecheck::cli::run_command(argc, argv); }
