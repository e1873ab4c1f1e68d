#include "sigma2/cli.hpp"

int main(int argc, char** argv) { return sigma2::cli::main(argc, argv); }
