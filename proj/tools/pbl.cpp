#include "pbl/cli.hpp"

int main(int argc, char** argv) { return pbl::cli::run(argc, argv); }
