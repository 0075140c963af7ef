#pragma once

#include <stdexcept>
#include <string>

namespace steinlab {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define STEINLAB_ERROR(Name)                                        \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  };

STEINLAB_ERROR(ShapeMismatch)
STEINLAB_ERROR(WeightsNotNormalized)
STEINLAB_ERROR(ActionInvalid)
STEINLAB_ERROR(NotSemisimple)
STEINLAB_ERROR(NotAbelian)
STEINLAB_ERROR(InvalidGroup)
STEINLAB_ERROR(RankAmbiguous)
STEINLAB_ERROR(NotSubalgebra)
STEINLAB_ERROR(UnitsInvalid)
STEINLAB_ERROR(GeneratingSetNotScaled)
STEINLAB_ERROR(NotGenerating)
STEINLAB_ERROR(NotRightClosed)
STEINLAB_ERROR(NotSubgroup)
STEINLAB_ERROR(SpecInvalid)

#undef STEINLAB_ERROR

}  // namespace steinlab
