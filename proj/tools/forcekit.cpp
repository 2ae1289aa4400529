#include "forcekit/cli.hpp"

int main(int argc, char** argv) { return forcekit::cli::dispatch(argc, argv); }
