#pragma once

#include <stdexcept>
#include <string>

namespace sl2orbit {

// Process exit codes used by the CLI; library errors carry the class
// they belong to so the front end never has to guess.
enum class errc : int {
  input = 2,             // bad input, wrong regime, terminated expansion
  precision = 3,         // an enclosure could not be refined enough
  bound_violation = 4,   // a certified inequality failed (internal bug)
  insufficient_data = 5, // not enough records/data to estimate
};

class error : public std::runtime_error {
public:
  error(errc code, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what),
        code_(code),
        kind_(std::move(kind)) {}

  errc code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }
  const std::string& kind() const { return kind_; }

private:
  errc code_;
  std::string kind_;
};

#define SL2ORBIT_ERROR(NAME, KIND, CODE)                        \
  class NAME : public error {                                   \
  public:                                                       \
    explicit NAME(const std::string& what)                      \
        : error(errc::CODE, KIND, what) {}                      \
  }

SL2ORBIT_ERROR(parse_error, "ParseError", input);
SL2ORBIT_ERROR(rational_input_error, "RationalInput", input);
SL2ORBIT_ERROR(slope_rational_error, "SlopeRational", input);
SL2ORBIT_ERROR(division_by_zero_error, "DivisionByZero", input);
SL2ORBIT_ERROR(zero_row_error, "ZeroRow", input);
SL2ORBIT_ERROR(k_too_small_error, "KTooSmall", input);
SL2ORBIT_ERROR(wrong_quadrant_error, "WrongQuadrant", input);
SL2ORBIT_ERROR(even_k_error, "EvenK", input);
SL2ORBIT_ERROR(bound_not_yet_reached_error, "BoundNotYetReached", input);
SL2ORBIT_ERROR(stream_empty_error, "StreamEmpty", input);
SL2ORBIT_ERROR(cap_exceeded_error, "CapExceeded", input);
SL2ORBIT_ERROR(precondition_failed_error, "PreconditionFailed", input);
SL2ORBIT_ERROR(precision_exhausted_error, "PrecisionExhausted", precision);
SL2ORBIT_ERROR(bound_violated_error, "BoundViolated", bound_violation);
SL2ORBIT_ERROR(insufficient_data_error, "InsufficientData", insufficient_data);

#undef SL2ORBIT_ERROR

} // namespace sl2orbit
