#pragma once

namespace sidkit::cli {

// Runs the `sidkit` command line. Exit codes: 0 success, 1 input/parse
// error (unreadable or malformed files), 2 contract/config error (bad
// flags, bad config keys, violated preconditions).
int run(int argc, const char* const* argv);

}  // namespace sidkit::cli
