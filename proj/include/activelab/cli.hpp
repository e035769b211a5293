#pragma once

namespace activelab {

/// Entry point behind the `active-lab` binary.  Subcommands: simulate,
/// sweep, paired, certify, verify-tnc, pack.  Returns 0 on success, 1 on
/// validation/usage errors, 2 on runtime failures.
int cli_main(int argc, const char* const* argv);

}  // namespace activelab
