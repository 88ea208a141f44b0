#include "bonnetforge/pipeline.hpp"

int main(int argc, char** argv) { return bonnetforge::run_cli(argc, argv); }
