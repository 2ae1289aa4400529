#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace forcekit::cli {

inline constexpr const char* kVersion = "0.1.0";

// Runs one command line (argv[0] is the program name). Exit status: 0 on
// success, 1 on domain errors, 2 on usage or scenario errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

// Writes bytes to path through a temporary file in the same directory and a
// rename, so readers never observe a partial file.
void write_atomic(const std::string& path, const std::string& bytes);

}  // namespace forcekit::cli
