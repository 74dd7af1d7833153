#include "aerosurvey/cli.hpp"

int main(int argc, char** argv) { return aerosurvey::run_cli(argc, argv); }
