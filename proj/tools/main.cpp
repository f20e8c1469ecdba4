#include "cli_app.hpp"

int main(int argc, char** argv) { return markit_cli_main(argc, argv); }
