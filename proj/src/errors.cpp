#include "ssr/errors.hpp"

namespace ssr {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::NonPrime: return "NonPrime";
    case ErrorKind::ReducibleModulus: return "ReducibleModulus";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::ZeroFunction: return "ZeroFunction";
    case ErrorKind::CharacteristicDividesExponent: return "CharacteristicDividesExponent";
    case ErrorKind::CountsInconsistent: return "CountsInconsistent";
    case ErrorKind::CountingBoundExceeded: return "CountingBoundExceeded";
    case ErrorKind::NotEisenstein: return "NotEisenstein";
    case ErrorKind::PrecisionTooLow: return "PrecisionTooLow";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::NegativeValuation: return "NegativeValuation";
    case ErrorKind::NotGalois: return "NotGalois";
    case ErrorKind::NotMonogenicWitness: return "NotMonogenicWitness";
    case ErrorKind::CatalogExhausted: return "CatalogExhausted";
    case ErrorKind::RootMultiplicityMismatch: return "RootMultiplicityMismatch";
    case ErrorKind::NotSplit: return "NotSplit";
    case ErrorKind::MatrixNotIntegral: return "MatrixNotIntegral";
    case ErrorKind::NoRationalFixedPoint: return "NoRationalFixedPoint";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::IsProperPower: return "IsProperPower";
    case ErrorKind::AdmissibilityViolation: return "AdmissibilityViolation";
    case ErrorKind::GenusMismatch: return "GenusMismatch";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NoSecondFixedPoint: return "NoSecondFixedPoint";
    case ErrorKind::CocycleInconsistent: return "CocycleInconsistent";
    case ErrorKind::NormNotOne: return "NormNotOne";
    case ErrorKind::GluingAmbiguity: return "GluingAmbiguity";
    case ErrorKind::NonIntegralFactor: return "NonIntegralFactor";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::NonIntegralSwan: return "NonIntegralSwan";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace ssr
