#pragma once

namespace fivec {

// Full command-line front end (mine / generalize / evaluate / explain /
// synth). Returns the process exit code: 0 success, 1 runtime failure,
// 2 usage or configuration error. Failures print one machine-readable JSON
// object on stderr.
int run_cli(int argc, const char* const* argv);

} // namespace fivec
