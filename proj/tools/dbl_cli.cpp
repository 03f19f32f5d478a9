#include "dbl/cli.hpp"

int main(int argc, char** argv) { return dbl::cli::dispatch(argc, argv); }
