#include "lightshift/cli.hpp"

int main(int argc, char **argv) { return lightshift::run_cli(argc, argv); }
