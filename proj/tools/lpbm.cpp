#include "lpbm/cli.hpp"

int main(int argc, char** argv) { return lpbm::cli::dispatch(argc, argv); }
