#include "spiked/commands.hpp"

int main(int argc, char** argv) { return spiked::run_cli(argc, argv); }
