#include "cli.hpp"

int main(int argc, char** argv) { return bcsl::cli::dispatch(argc, argv); }
