#include "cli.hpp"

int main(int argc, char** argv) { return curecg::cli::main(argc, argv); }
