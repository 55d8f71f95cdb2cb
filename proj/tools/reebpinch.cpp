#include "reebpinch/cli_report.hpp"

int main(int argc, char** argv) { return reebpinch::cli::main_entry(argc, argv); }
