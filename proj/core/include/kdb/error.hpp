#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kdb {

enum class ErrorCode
{
  invalid_argument,
  dimension_mismatch,
  not_strictly_positive,
  zero_row_sum,
  marginal_mismatch,
  empty_sample,
  out_of_range,
  all_candidates_failed,
  kernel_underflow,
  not_converged,
  parse_error,
  io_error
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code)
  {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Iterative routines never throw on hitting the iteration cap. The result
// carries the status and the residual at exit instead.
enum class Status
{
  converged,
  max_iterations
};

std::string_view to_string(Status status);

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what)
{
  if (!cond)
    fail(code, what);
}

} // namespace kdb
