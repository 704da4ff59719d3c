#include <quarterwave/cli.hpp>

int main(int argc, char** argv) { return quarterwave::cli::run(argc, argv); }
