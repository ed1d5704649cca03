#include "wintrack/cli_commands.hpp"

int main(int argc, char** argv) { return wintrack::run_cli(argc, argv); }
