#include "mskmc/cli.hpp"

int main(int argc, char** argv) { return mskmc::cli::main(argc, argv); }
