#include "otpsim/cli.hpp"

int main(int argc, char** argv) { return otpsim::cli_main(argc, argv); }
