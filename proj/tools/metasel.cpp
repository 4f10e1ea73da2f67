#include "metasel/cli.hpp"

int main(int argc, char** argv) { return metasel::cli::run_cli(argc, argv); }
