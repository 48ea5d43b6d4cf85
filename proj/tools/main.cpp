#include "cli.hpp"

int main(int argc, char** argv) { return dwr::cli::run_cli(argc, argv); }
