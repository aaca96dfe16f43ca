#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hetcache {

/// The four network parts whose rates bound the capacity.
enum class Part { MR, MBH, SR, SBH };

std::string_view to_string(Part part);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// The mean-interference lower bound on spectrum efficiency is vacuous (τ ≤ 0).
class LowSnrError : public Error {
 public:
  using Error::Error;
};

/// A rate requirement cannot be met even with a single user on the part.
class InfeasiblePart : public Error {
 public:
  InfeasiblePart(Part part, const std::string& what) : Error(what), part_(part) {}
  Part part() const noexcept { return part_; }

 private:
  Part part_;
};

/// The analytic solution does not apply to the backhaul regime of the inputs.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// The tail of the catalog holds less popularity mass than a threshold needs.
class CatalogTooSmall : public Error {
 public:
  using Error::Error;
};

/// Scenario or simulation configuration is well-formed but invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Scenario text could not be read or parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetcache
