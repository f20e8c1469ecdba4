#pragma once

// Entry point for the markit command line tool, split out so tests can drive
// the full argument pipeline in-process.
int markit_cli_main(int argc, const char* const* argv);
