#include "dnsurf/cli.hpp"

int main(int argc, char** argv) { return dnsurf::cli::run(argc, argv); }
