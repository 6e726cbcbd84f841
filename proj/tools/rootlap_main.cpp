#include "rootlap/cli_run.hpp"

int main(int argc, char** argv) { return rootlap::run_cli(argc, argv); }
