#pragma once

#include <ostream>

namespace vcam::workbench {

/// Entry point of the `vcam` tool. Results go to `out`; every failure writes
/// one JSON line {"error", "detail"} to `err` and returns nonzero.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vcam::workbench
