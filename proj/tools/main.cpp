#include "acda/cli.hpp"

int main(int argc, char** argv) { return acda::run_cli(argc, argv); }
