#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deskorg {

enum class ErrorCode {
  degenerate_input,
  invalid_polygon,
  too_few_points,
  no_consensus,
  unsupported_category,
  unknown_category,
  unknown_object,
  no_support,
  edge_unreachable,
  infeasible_thickness,
  offset_out_of_range,
  cyclic_support,
  stale_plan,
  no_overhang,
  nothing_in_hand,
  unknown_spec,
  schema,
  io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::degenerate_input: return "DegenerateInput";
    case ErrorCode::invalid_polygon: return "InvalidPolygon";
    case ErrorCode::too_few_points: return "TooFewPoints";
    case ErrorCode::no_consensus: return "NoConsensus";
    case ErrorCode::unsupported_category: return "UnsupportedCategory";
    case ErrorCode::unknown_category: return "UnknownCategory";
    case ErrorCode::unknown_object: return "UnknownObject";
    case ErrorCode::no_support: return "NoSupport";
    case ErrorCode::edge_unreachable: return "EdgeUnreachable";
    case ErrorCode::infeasible_thickness: return "InfeasibleThickness";
    case ErrorCode::offset_out_of_range: return "OffsetOutOfRange";
    case ErrorCode::cyclic_support: return "CyclicSupport";
    case ErrorCode::stale_plan: return "StalePlan";
    case ErrorCode::no_overhang: return "NoOverhang";
    case ErrorCode::nothing_in_hand: return "NothingInHand";
    case ErrorCode::unknown_spec: return "UnknownSpec";
    case ErrorCode::schema: return "SchemaError";
    case ErrorCode::io: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace deskorg
