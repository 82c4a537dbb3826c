#pragma once

namespace fracspec::cli {

/// command-line front end; returns the process exit status
/// (0 success, 2 configuration error, 3 tolerance breach)
int run(int argc, const char* const* argv);

}  // namespace fracspec::cli
