#include "cli.hpp"

int main(int argc, char** argv) { return fungrasp::cli::run(argc, argv); }
