#pragma once

#include <stdexcept>
#include <string>

namespace slicenn {

/// Base of every error raised by the library. `kind()` is a stable tag used
/// in CLI diagnostics and in failed sweep records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SLICENN_DEFINE_ERROR(Name, tag)                                    \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(tag, what) {}           \
  }

SLICENN_DEFINE_ERROR(ParameterError, "parameter");
SLICENN_DEFINE_ERROR(EmptyRequestError, "empty-request");
SLICENN_DEFINE_ERROR(UnsupportedRatioError, "unsupported-ratio");
SLICENN_DEFINE_ERROR(ConfigurationError, "configuration");
SLICENN_DEFINE_ERROR(DimensionError, "dimension");
SLICENN_DEFINE_ERROR(BoundaryError, "boundary");
SLICENN_DEFINE_ERROR(AlignmentError, "alignment");
SLICENN_DEFINE_ERROR(StepSizeError, "step-size");
SLICENN_DEFINE_ERROR(DivergenceError, "divergence");
SLICENN_DEFINE_ERROR(FormatError, "format");
SLICENN_DEFINE_ERROR(IoError, "io");

#undef SLICENN_DEFINE_ERROR

}  // namespace slicenn
