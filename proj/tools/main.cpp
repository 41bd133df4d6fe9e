#include "lflx/cli.hpp"

int main(int argc, char** argv) { return lflx::cli_main(argc, argv); }
