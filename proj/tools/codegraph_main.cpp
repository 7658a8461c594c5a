#include "codegraph/cli.hpp"

int main(int argc, char** argv) { return codegraph::cli::run(argc, argv); }
