#include "lod/cli.hpp"

int main(int argc, char** argv) { return lod::cli::run(argc, argv); }
