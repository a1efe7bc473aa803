#pragma once

namespace qcsim {

// Command-line front end (subcommands: run, vqe, qaoa, qml, qec, zne,
// qft-check). Returns the process exit code; 2 signals an input validation
// failure, reported on stderr with file:line:column when available.
int cli_main(int argc, char** argv);

}  // namespace qcsim
