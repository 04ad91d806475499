#include "cli.hpp"

int main(int argc, char** argv) { return sfde::cli::run(argc, argv); }
