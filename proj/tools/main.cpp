#include "cli/commands.hpp"

int main(int argc, char** argv) { return hierenv::cli::run(argc, argv); }
