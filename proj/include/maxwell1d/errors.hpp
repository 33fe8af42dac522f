#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maxwell1d {

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorCategory { usage, numerical, io };

class Error : public std::runtime_error {
public:
  Error(const std::string& what, ErrorCategory category)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

#define MAXWELL1D_DEFINE_ERROR(Name, Category)                                \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string& what)                                    \
        : Error(std::string(#Name ": ") + what, ErrorCategory::Category) {}   \
  };

MAXWELL1D_DEFINE_ERROR(InvalidArgument, usage)
MAXWELL1D_DEFINE_ERROR(OutOfWindow, usage)
MAXWELL1D_DEFINE_ERROR(NoRoot, numerical)
MAXWELL1D_DEFINE_ERROR(ElasticSingularity, numerical)
MAXWELL1D_DEFINE_ERROR(TailViolation, numerical)
MAXWELL1D_DEFINE_ERROR(Divergence, numerical)
MAXWELL1D_DEFINE_ERROR(InadmissibleDelta, numerical)
MAXWELL1D_DEFINE_ERROR(NoConvergence, numerical)
MAXWELL1D_DEFINE_ERROR(InsufficientTail, numerical)
MAXWELL1D_DEFINE_ERROR(IncompatibleMoments, numerical)
MAXWELL1D_DEFINE_ERROR(DegenerateFit, numerical)
MAXWELL1D_DEFINE_ERROR(AsymmetryError, numerical)
MAXWELL1D_DEFINE_ERROR(ExcessNegativity, numerical)
MAXWELL1D_DEFINE_ERROR(MassExclusionTooLarge, numerical)
MAXWELL1D_DEFINE_ERROR(IoError, io)

#undef MAXWELL1D_DEFINE_ERROR

class MalformedSnapshot : public Error {
public:
  MalformedSnapshot(const std::string& what, std::size_t line)
      : Error("MalformedSnapshot (line " + std::to_string(line) + "): " + what,
              ErrorCategory::io),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace maxwell1d
