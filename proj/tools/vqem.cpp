#include "vqem/cli.hpp"

int main(int argc, char** argv) { return vqem::run_cli(argc, argv); }
