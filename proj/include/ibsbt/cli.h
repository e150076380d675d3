#pragma once

namespace ibsbt {

// Full command-line driver (subcommands: backtest, sweep, probe, ibs).
// Returns the process exit code; never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace ibsbt
