#include "egyptfrac/cli.hpp"

int main(int argc, char** argv) { return egyptfrac::run(argc, argv); }
