#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dn {

/// Batch CLI entry point: parses arguments, runs one command, writes JSON to
/// `out` and diagnostics to `err`. Exit codes: 0 success, 1 contract
/// violation (duplicates, bad parameters), 2 parse/usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dn
