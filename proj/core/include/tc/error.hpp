#pragma once

#include <stdexcept>
#include <string>

namespace tc {

// Error taxonomy mirrors the CLI exit codes: usage = 1, precondition = 2,
// format/io = 3.
enum class errc {
  usage = 1,
  precondition = 2,
  format = 3,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail_format(const std::string& what) { throw error(errc::format, what); }
[[noreturn]] inline void fail_precondition(const std::string& what) { throw error(errc::precondition, what); }
[[noreturn]] inline void fail_usage(const std::string& what) { throw error(errc::usage, what); }

}  // namespace tc
