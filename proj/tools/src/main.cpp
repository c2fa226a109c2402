#include <iostream>

#include "gadaboost/cli/app.hpp"

int main(int argc, char** argv) { return gadaboost::cli::run(argc, argv, std::cout, std::cerr); }
