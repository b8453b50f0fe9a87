#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace conecalc {

enum class ErrorKind {
  NonHermitian,
  DimMismatch,
  BadFactorization,
  NotReal,
  NotRealForm,
  NotPreserving,
  Indeterminate,
  InputNotInClass,
  SpectralBound,
  Inconsistent,
  PreconditionFailed,
  ArrowFailed,
  LinkFailed,
  NotSimple,
  NotCommuting,
  NotInAPlus,
  MuMismatch,
  NotDensityMatrix,
  SpecFailed,
  ClassificationFailed,
  DimCap,
  SignRuleFailed,
  EmptySector,
  SchemaError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::BadFactorization: return "BadFactorization";
    case ErrorKind::NotReal: return "NotReal";
    case ErrorKind::NotRealForm: return "NotRealForm";
    case ErrorKind::NotPreserving: return "NotPreserving";
    case ErrorKind::Indeterminate: return "Indeterminate";
    case ErrorKind::InputNotInClass: return "InputNotInClass";
    case ErrorKind::SpectralBound: return "SpectralBound";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::ArrowFailed: return "ArrowFailed";
    case ErrorKind::LinkFailed: return "LinkFailed";
    case ErrorKind::NotSimple: return "NotSimple";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::NotInAPlus: return "NotInAPlus";
    case ErrorKind::MuMismatch: return "MuMismatch";
    case ErrorKind::NotDensityMatrix: return "NotDensityMatrix";
    case ErrorKind::SpecFailed: return "SpecFailed";
    case ErrorKind::ClassificationFailed: return "ClassificationFailed";
    case ErrorKind::DimCap: return "DimCap";
    case ErrorKind::SignRuleFailed: return "SignRuleFailed";
    case ErrorKind::EmptySector: return "EmptySector";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable kind and, for chain-like inputs,
/// the index of the offending element.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace conecalc
