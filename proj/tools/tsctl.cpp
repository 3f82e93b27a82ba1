#include "tsc/cli.hpp"

int main(int argc, char** argv) { return tsc::cli::run(argc, argv); }
