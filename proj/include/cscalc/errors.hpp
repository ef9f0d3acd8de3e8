#pragma once

// Exception taxonomy for the contact-surgery calculus.  Every failure mode a
// caller can provoke through the public API (bad arcs, unbalanced Euler
// bookkeeping, incompatible framings, irreversible histories, ...) gets its
// own type so tests and the CLI can match on the class rather than on message
// text.  All of them derive from CscError, which carries a plain message.

#include <stdexcept>
#include <string>

namespace cscalc {

class CscError : public std::runtime_error {
 public:
  explicit CscError(const std::string& msg) : std::runtime_error(msg) {}
};

// An attachment arc whose crossing pattern is not one of the recognized
// shapes (wiggle, cancel, nested cancel, essential triple, wrap).
class InvalidArc : public CscError {
 public:
  explicit InvalidArc(const std::string& msg) : CscError(msg) {}
};

// A rewrite step was asked for on a dividing set that does not contain the
// configuration the step consumes.
class ConfigurationAbsent : public CscError {
 public:
  explicit ConfigurationAbsent(const std::string& msg) : CscError(msg) {}
};

// normalize() requires relative Euler number zero; anything else cannot be
// reduced to the essential-curves-only form.
class EulerObstruction : public CscError {
 public:
  explicit EulerObstruction(const std::string& msg) : CscError(msg) {}
};

// Round surgery of index 1 needs two disjoint, still-live knots.
class KnotsNotDisjoint : public CscError {
 public:
  explicit KnotsNotDisjoint(const std::string& msg) : CscError(msg) {}
};

// The supplied identification does not carry the first boundary's dividing
// slope onto the second one's.
class FramingMismatch : public CscError {
 public:
  explicit FramingMismatch(const std::string& msg) : CscError(msg) {}
};

// Round surgery of index 2 needs a torus with a chosen meridian direction.
class NoMeridian : public CscError {
 public:
  explicit NoMeridian(const std::string& msg) : CscError(msg) {}
};

// Reversal is only defined for an event whose footprint is untouched by
// later still-active events.
class EventNotReversibleHere : public CscError {
 public:
  explicit EventNotReversibleHere(const std::string& msg) : CscError(msg) {}
};

class KnotNotFound : public CscError {
 public:
  explicit KnotNotFound(const std::string& msg) : CscError(msg) {}
};

// Torus insertions only make sense along a torus whose dividing set carries
// no contractible curves.
class NotPreLagrangian : public CscError {
 public:
  explicit NotPreLagrangian(const std::string& msg) : CscError(msg) {}
};

// Each adjustment twist moves the relative Euler number by exactly 2, so a
// target of the wrong parity is unreachable.
class TargetParityMismatch : public CscError {
 public:
  explicit TargetParityMismatch(const std::string& msg) : CscError(msg) {}
};

// The four-surgery macro self-checks its postconditions; a failed check is
// reported rather than silently accepted.
class MacroPostconditionFailed : public CscError {
 public:
  explicit MacroPostconditionFailed(const std::string& msg) : CscError(msg) {}
};

// Script-front-end errors.
class SyntaxError : public CscError {
 public:
  SyntaxError(int line, int col, const std::string& msg)
      : CscError("line " + std::to_string(line) + ", col " +
                 std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class UseBeforeDeclare : public CscError {
 public:
  explicit UseBeforeDeclare(const std::string& msg) : CscError(msg) {}
};

// Rendering is grid-based; slopes beyond the grid resolution are refused.
class UnsupportedSlope : public CscError {
 public:
  explicit UnsupportedSlope(const std::string& msg) : CscError(msg) {}
};

}  // namespace cscalc
