#include "broucke/cli.hpp"

int main(int argc, char** argv) { return broucke::cli::dispatch(argc, argv); }
