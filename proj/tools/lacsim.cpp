#include "lacsim/cli.hpp"

int main(int argc, char** argv) { return lacsim::run_cli(argc, argv); }
