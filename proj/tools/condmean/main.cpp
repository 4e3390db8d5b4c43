#include "condmean/commands.hpp"

int main(int argc, char** argv) { return condmean::cli::run_main(argc, argv); }
