#include "cli.hpp"

int main(int argc, char** argv) { return pdarcy::cli::dispatch(argc, argv); }
