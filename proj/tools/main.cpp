#include "cli.hpp"

int main(int argc, char** argv) { return sidkit::cli::run(argc, argv); }
