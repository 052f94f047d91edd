#pragma once

#include <iosfwd>

namespace rtf::cli {

// Runs one `rtf` command line. Returns 0 on success, 1 on a domain error
// (bad parameters, unreadable files, failed self-test) and 2 on a usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rtf::cli
