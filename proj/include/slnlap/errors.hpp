#pragma once

#include <stdexcept>
#include <string>

namespace slnlap {

// Base class for all library errors; what() carries the diagnostic,
// name() the stable error identifier surfaced by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& msg)
      : std::runtime_error(name + ": " + msg), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define SLNLAP_DEFINE_ERROR(NAME)                            \
  class NAME : public Error {                                \
   public:                                                   \
    explicit NAME(const std::string& msg) : Error(#NAME, msg) {} \
  }

SLNLAP_DEFINE_ERROR(ParseError);
SLNLAP_DEFINE_ERROR(DimensionMismatch);
SLNLAP_DEFINE_ERROR(NotPositiveDefinite);
SLNLAP_DEFINE_ERROR(DomainError);
SLNLAP_DEFINE_ERROR(InfeasibleConstraints);
SLNLAP_DEFINE_ERROR(MaxIterations);
SLNLAP_DEFINE_ERROR(PartitionFailure);
SLNLAP_DEFINE_ERROR(ThetaTooSmall);
SLNLAP_DEFINE_ERROR(OverflowError);
SLNLAP_DEFINE_ERROR(NoConvergence);
SLNLAP_DEFINE_ERROR(DimensionUnsupported);
SLNLAP_DEFINE_ERROR(OddM);
SLNLAP_DEFINE_ERROR(MTooLarge);
SLNLAP_DEFINE_ERROR(DimensionTooLarge);
SLNLAP_DEFINE_ERROR(NonConvergent);
SLNLAP_DEFINE_ERROR(SingularSubmatrix);
SLNLAP_DEFINE_ERROR(IoError);
SLNLAP_DEFINE_ERROR(UsageError);

#undef SLNLAP_DEFINE_ERROR

}  // namespace slnlap
