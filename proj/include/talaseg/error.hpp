#pragma once

#include <stdexcept>
#include <string>

namespace talaseg {

/// Error classes; the CLI maps them onto exit codes (io -> 2, too_short -> 3,
/// degenerate -> 4).
enum class Errc {
  io_unreadable,
  format_unsupported,
  audio_empty,
  too_short,
  degenerate,
  invalid_argument,
  dimension_mismatch,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

  int exit_code() const {
    switch (code_) {
      case Errc::io_unreadable:
      case Errc::format_unsupported:
      case Errc::audio_empty:
        return 2;
      case Errc::too_short:
        return 3;
      default:
        return 4;
    }
  }

 private:
  Errc code_;
};

}  // namespace talaseg
