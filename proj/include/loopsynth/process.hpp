#pragma once

#include <string>
#include <vector>

namespace loopsynth {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool launched = false;
  std::string out;
  std::string err;
};

/// Runs `executable args...` (PATH lookup), feeds `input` on stdin and
/// collects stdout/stderr. The child is killed once `timeout_seconds` elapse.
ProcessResult run_process(const std::string& executable, const std::vector<std::string>& args,
                          const std::string& input, double timeout_seconds);

}  // namespace loopsynth
