#include "qretail/cli.hpp"

int main(int argc, char** argv) { return qretail::cli::run(argc, argv); }
