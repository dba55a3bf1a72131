#pragma once
// Command-line surface: run / sweep / bounds / inspect-assignment.

namespace sgc {

// Exit codes: 0 success, 1 usage/config error, 2 runtime or divergence error.
int dispatch(int argc, char** argv);

}  // namespace sgc
