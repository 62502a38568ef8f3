#include "kdb/error.hpp"

namespace kdb {

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::not_strictly_positive: return "NotStrictlyPositive";
    case ErrorCode::zero_row_sum: return "ZeroRowSum";
    case ErrorCode::marginal_mismatch: return "MarginalMismatch";
    case ErrorCode::empty_sample: return "EmptySample";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::all_candidates_failed: return "AllCandidatesFailed";
    case ErrorCode::kernel_underflow: return "KernelUnderflow";
    case ErrorCode::not_converged: return "MaxIterationsExceeded";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Status status)
{
  return status == Status::converged ? "converged" : "max_iterations";
}

void fail(ErrorCode code, const std::string& what)
{
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

} // namespace kdb
