#pragma once

#include <stdexcept>
#include <string>

namespace bbgkz {

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define BBGKZ_DEFINE_ERROR(Name)                              \
  class Name : public Error {                                 \
   public:                                                    \
    using Error::Error;                                       \
    const char* kind() const noexcept override { return #Name; } \
  }

// Input data.
BBGKZ_DEFINE_ERROR(InvalidGroup);
BBGKZ_DEFINE_ERROR(DimensionMismatch);
BBGKZ_DEFINE_ERROR(NoDegreeFunctional);
BBGKZ_DEFINE_ERROR(NotSpanning);
BBGKZ_DEFINE_ERROR(NotPointed);
BBGKZ_DEFINE_ERROR(DegeneratePolytope);
BBGKZ_DEFINE_ERROR(KPrimBoundExceeded);
BBGKZ_DEFINE_ERROR(NondegeneracyRetriesExhausted);
BBGKZ_DEFINE_ERROR(DegenerateCoefficients);
BBGKZ_DEFINE_ERROR(SchemaError);

// Internal consistency; these indicate a broken certificate or a bug.
BBGKZ_DEFINE_ERROR(InconsistentSystem);
BBGKZ_DEFINE_ERROR(RegionTooTight);
BBGKZ_DEFINE_ERROR(ResidualTooLarge);

#undef BBGKZ_DEFINE_ERROR

}  // namespace bbgkz
