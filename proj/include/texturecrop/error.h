#pragma once

#include <stdexcept>
#include <string>

namespace texturecrop {

// Base for every error raised by the library. Subclasses name the failure
// kinds callers are expected to distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TEXTURECROP_ERROR(Name)        \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

TEXTURECROP_ERROR(DecodeError);
TEXTURECROP_ERROR(EncodeError);
TEXTURECROP_ERROR(UnsupportedChannels);
TEXTURECROP_ERROR(DegenerateGeometry);
TEXTURECROP_ERROR(OutOfBounds);
TEXTURECROP_ERROR(InvalidArgument);
TEXTURECROP_ERROR(ScorerFailure);
TEXTURECROP_ERROR(MissingScore);
TEXTURECROP_ERROR(DuplicateScore);
TEXTURECROP_ERROR(RangeViolation);
TEXTURECROP_ERROR(EmptyInput);
TEXTURECROP_ERROR(SingleClass);
TEXTURECROP_ERROR(NoPositives);
TEXTURECROP_ERROR(FormatError);

#undef TEXTURECROP_ERROR

}  // namespace texturecrop
