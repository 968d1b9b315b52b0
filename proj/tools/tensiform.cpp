#include "tensiform/cli.hpp"

int main(int argc, char** argv) { return tensiform::cli_main(argc, argv); }
