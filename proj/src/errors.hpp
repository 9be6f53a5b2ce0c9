#pragma once

#include <stdexcept>
#include <string>

namespace ahmsim {

enum class ErrorKind {
  invalid_argument,
  numerical,
  stiffness,
  capacity,
  degeneracy,
  labeling,
  adiabaticity,
  fit,
  bracket,
  calibration,
  config,
  clifford,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define AHMSIM_DEFINE_ERROR(Name, kind_value)                                       \
  class Name : public Error {                                                       \
   public:                                                                          \
    explicit Name(const std::string& msg) : Error(ErrorKind::kind_value, msg) {}    \
  }

AHMSIM_DEFINE_ERROR(InvalidArgumentError, invalid_argument);
AHMSIM_DEFINE_ERROR(NumericalError, numerical);
AHMSIM_DEFINE_ERROR(StiffnessError, stiffness);
AHMSIM_DEFINE_ERROR(CapacityError, capacity);
AHMSIM_DEFINE_ERROR(DegeneracyError, degeneracy);
AHMSIM_DEFINE_ERROR(LabelingError, labeling);
AHMSIM_DEFINE_ERROR(AdiabaticityError, adiabaticity);
AHMSIM_DEFINE_ERROR(FitError, fit);
AHMSIM_DEFINE_ERROR(BracketError, bracket);
AHMSIM_DEFINE_ERROR(CalibrationError, calibration);
AHMSIM_DEFINE_ERROR(ConfigError, config);
AHMSIM_DEFINE_ERROR(CliffordError, clifford);

#undef AHMSIM_DEFINE_ERROR

}  // namespace ahmsim
