#include "iriscs/harness.hpp"

int main(int argc, char** argv) { return iriscs::cli_main(argc, argv); }
