#include "chorex/cli.hpp"

int main(int argc, char** argv) { return chorex::cli::run(argc, argv); }
