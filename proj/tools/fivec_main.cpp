#include "fivec/cli.hpp"

int main(int argc, char** argv) { return fivec::run_cli(argc, argv); }
