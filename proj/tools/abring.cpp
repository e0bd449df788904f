#include "abring/cli.hpp"

int main(int argc, char** argv) { return abring::cli_main(argc, argv); }
