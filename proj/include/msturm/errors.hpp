#pragma once

#include <stdexcept>
#include <string>

namespace msturm {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MSTURM_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

MSTURM_DEFINE_ERROR(PreconditionError);
MSTURM_DEFINE_ERROR(DegenerateMetric);
MSTURM_DEFINE_ERROR(InvalidSubspace);
MSTURM_DEFINE_ERROR(ParseError);
MSTURM_DEFINE_ERROR(SchemaError);
MSTURM_DEFINE_ERROR(ValidationFailed);
MSTURM_DEFINE_ERROR(PerturbationBrokeInvariant);
MSTURM_DEFINE_ERROR(NotTimelike);
MSTURM_DEFINE_ERROR(MissingSeed);
MSTURM_DEFINE_ERROR(IntegrationFailure);
MSTURM_DEFINE_ERROR(EndpointFocal);
MSTURM_DEFINE_ERROR(DegenerateFocalInstant);
MSTURM_DEFINE_ERROR(NoAgreement);
MSTURM_DEFINE_ERROR(AllTrialsDegenerate);
MSTURM_DEFINE_ERROR(EmptyKernel);
MSTURM_DEFINE_ERROR(LeftChart);
MSTURM_DEFINE_ERROR(CurvatureAsymmetry);

#undef MSTURM_DEFINE_ERROR

/// Root refinement failed; carries the offending bracket.
class UnresolvedRoot : public Error {
 public:
  UnresolvedRoot(const std::string& what, double lo, double hi)
      : Error(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace msturm
