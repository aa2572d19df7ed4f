#include "nvcycle/cli.hpp"

int main(int argc, char** argv) { return nvcycle::run_cli(argc, argv); }
