#include "lqineq/cli.hpp"

int main(int argc, char** argv) { return lqineq::cli::main_entry(argc, argv); }
