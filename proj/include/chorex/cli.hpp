#pragma once

namespace chorex::cli {

// Dispatches the chorex subcommands. Exit status: 0 success, 1 extraction /
// projection / similarity failure, 2 usage or parse errors (simcheck also
// uses 2 for Unknown).
int run(int argc, char** argv);

}  // namespace chorex::cli
