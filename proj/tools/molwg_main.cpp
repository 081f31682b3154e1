#include "molwg/cli.hpp"

int main(int argc, char** argv) { return molwg::run_cli(argc, argv); }
