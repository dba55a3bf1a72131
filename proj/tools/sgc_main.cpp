#include "sgc/cli.hpp"

int main(int argc, char** argv) { return sgc::dispatch(argc, argv); }
