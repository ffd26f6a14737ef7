#include "cli.hpp"

int main(int argc, char** argv) { return qmam::cli::run_cli(argc, argv); }
