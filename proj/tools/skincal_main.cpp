#include "skincal/commands.hpp"

int main(int argc, char** argv) { return skincal::run_cli(argc, argv); }
