#pragma once

// Command-line front door. Subcommands: modes, coupling, phase-scan, fdtd,
// bragg, hom, mzgate. Exit codes: 0 success, 2 config error, 3 numerical
// failure. All outputs go into the --out directory; result JSON embeds the
// run manifest without the timestamp so reruns are byte-identical.

namespace molwg {

int run_cli(int argc, const char* const* argv);

}  // namespace molwg
