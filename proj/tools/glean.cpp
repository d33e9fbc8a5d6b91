#include "glean/cli.hpp"

int main(int argc, char** argv) { return glean::cli::run(argc, argv); }
