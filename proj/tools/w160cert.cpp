#include "w160/cli.hpp"

int main(int argc, char** argv) { return w160::run_cli(argc, argv); }
