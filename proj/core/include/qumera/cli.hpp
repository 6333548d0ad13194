#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qumera {

// Runs one CLI invocation (args exclude the program name) and writes the JSON
// report to `out`. Exit codes: 0 success, 1 validation or check failure,
// 2 numeric refusal (verdict attached in the report), 3 I/O or schema error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qumera
