#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tmflow::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kValidationError = 3, kNumericalError = 4 };

/// Runs the command line `args` (without the program name). Output is a pure
/// function of the arguments and the files they name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tmflow::cli
