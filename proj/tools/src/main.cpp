#include "fujita/runner.hpp"

int main(int argc, char** argv) { return fujita::runner::cli_main(argc, argv); }
