#pragma once

#include <stdexcept>
#include <string>

namespace holdercone {

/// Base class of every error raised by the library. The CLI maps any
/// `Error` that escapes a command to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HOLDERCONE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

HOLDERCONE_ERROR(InvalidArgument);
HOLDERCONE_ERROR(OrderUnavailable);
HOLDERCONE_ERROR(DomainError);
HOLDERCONE_ERROR(ResolutionError);
HOLDERCONE_ERROR(Unsupported);
HOLDERCONE_ERROR(NegativityError);
HOLDERCONE_ERROR(RangeError);
HOLDERCONE_ERROR(SingularPoint);
HOLDERCONE_ERROR(UnsupportedOrder);
HOLDERCONE_ERROR(DegenerateFit);
HOLDERCONE_ERROR(RegularityMismatch);
HOLDERCONE_ERROR(ExtensionNotNonnegative);
HOLDERCONE_ERROR(ConfigError);
HOLDERCONE_ERROR(ParseError);

#undef HOLDERCONE_ERROR

}  // namespace holdercone
