#pragma once

#include <stdexcept>
#include <string>

namespace edelta {

// Base class for every error raised by the toolchain. Subcommands map these
// to exit codes > 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure (unreadable/unwritable path).
struct IoError : Error {
    using Error::Error;
};

} // namespace edelta
