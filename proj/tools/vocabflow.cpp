#include "vocabflow/cli.hpp"

int main(int argc, char** argv) { return vocabflow::cli::run(argc, argv); }
