#include "relosc/cli.hpp"

int main(int argc, char** argv) { return relosc::run_cli(argc, argv); }
