#include "coxsim/cli.hpp"

int main(int argc, char** argv) { return coxsim::cli::run(argc, argv); }
