#include "ddw_cli/cli.hpp"

int main(int argc, char** argv) { return ddw::cli::main(argc, argv); }
