#pragma once

#include <stdexcept>
#include <string>

namespace ssr {

enum class ErrorKind {
  Validation,
  NonPrime,
  ReducibleModulus,
  ZeroPolynomial,
  ZeroFunction,
  CharacteristicDividesExponent,
  CountsInconsistent,
  CountingBoundExceeded,
  NotEisenstein,
  PrecisionTooLow,
  PrecisionExhausted,
  NegativeValuation,
  NotGalois,
  NotMonogenicWitness,
  CatalogExhausted,
  RootMultiplicityMismatch,
  NotSplit,
  MatrixNotIntegral,
  NoRationalFixedPoint,
  NotDivisible,
  IsProperPower,
  AdmissibilityViolation,
  GenusMismatch,
  NotInvariant,
  NoSecondFixedPoint,
  CocycleInconsistent,
  NormNotOne,
  GluingAmbiguity,
  NonIntegralFactor,
  DegreeMismatch,
  NonIntegralSwan,
  Internal,
};

const char* error_kind_name(ErrorKind kind);

// Every failure carries the module that raised it so the driver can report provenance.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

[[noreturn]] inline void fail(ErrorKind kind, const char* module, const std::string& what) {
  throw Error(kind, module, what);
}

inline void require(bool cond, ErrorKind kind, const char* module, const std::string& what) {
  if (!cond) fail(kind, module, what);
}

}  // namespace ssr
