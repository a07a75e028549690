#pragma once

#include <stdexcept>
#include <string>

namespace cminet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CMINET_DEFINE_ERROR(Name)      \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

CMINET_DEFINE_ERROR(LoadError);
CMINET_DEFINE_ERROR(FilterError);
CMINET_DEFINE_ERROR(TransformError);
CMINET_DEFINE_ERROR(EstimatorError);
CMINET_DEFINE_ERROR(PathError);
CMINET_DEFINE_ERROR(SolverError);
CMINET_DEFINE_ERROR(SelectionError);
CMINET_DEFINE_ERROR(RuleError);
CMINET_DEFINE_ERROR(ConsensusError);
CMINET_DEFINE_ERROR(ThresholdError);
CMINET_DEFINE_ERROR(ExportError);
CMINET_DEFINE_ERROR(RenderError);
CMINET_DEFINE_ERROR(ConfigError);

#undef CMINET_DEFINE_ERROR

}  // namespace cminet
