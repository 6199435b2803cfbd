#ifndef TWEETPROBE_CLI_H_
#define TWEETPROBE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace tweetprobe {

inline constexpr const char* kToolVersion = "1.0.0";

// Subcommands: synth, ingest, tasks, embed, probe, sweep, report, replay.
// Returns 0 on success, 1 on validation or usage errors, 2 on runtime
// failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace tweetprobe

#endif  // TWEETPROBE_CLI_H_
