#pragma once

namespace broucke::cli {

/// Entry point for the `broucke` tool. Exit status: 0 success, 1 computation
/// failure or residual breach, 2 usage error.
int dispatch(int argc, char** argv);

}  // namespace broucke::cli
