#include "simop/cli.hpp"

int main(int argc, char** argv) { return simop::cli::main_entry(argc, argv); }
