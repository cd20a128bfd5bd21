#include "cli.hpp"

int main(int argc, char** argv) { return refinery::cli::run(argc, argv); }
