#pragma once

#include <stdexcept>
#include <string>

namespace wintrack {

// Error taxonomy shared across the library. Everything derives from
// TrackerError so callers can catch one base type at the CLI boundary.

class TrackerError : public std::runtime_error {
public:
    explicit TrackerError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A value outside its documented domain (non-finite angle, confidence <= 0, ...).
class InvalidValueError : public TrackerError {
public:
    explicit InvalidValueError(const std::string& msg) : TrackerError(msg) {}
};

/// A matrix became singular or ill-conditioned beyond what the filter tolerates.
class NumericalDegeneracyError : public TrackerError {
public:
    explicit NumericalDegeneracyError(const std::string& msg) : TrackerError(msg) {}
};

/// Frames fed out of order, or an operation applied at the wrong point in the cycle.
class SequencingError : public TrackerError {
public:
    explicit SequencingError(const std::string& msg) : TrackerError(msg) {}
};

/// Cross-structure references that do not line up (dangling node ids etc.).
class ConsistencyError : public TrackerError {
public:
    explicit ConsistencyError(const std::string& msg) : TrackerError(msg) {}
};

/// Input too large for an intentionally bounded code path (e.g. the exhaustive oracle).
class SizeGuardError : public TrackerError {
public:
    explicit SizeGuardError(const std::string& msg) : TrackerError(msg) {}
};

/// A metric has no defined value for the given inputs (e.g. MOTA with GT = 0).
class UndefinedMetricError : public TrackerError {
public:
    explicit UndefinedMetricError(const std::string& msg) : TrackerError(msg) {}
};

/// Filesystem-level failure: missing file, unreadable path, failed rename.
class IoError : public TrackerError {
public:
    explicit IoError(const std::string& msg) : TrackerError(msg) {}
};

/// Syntactically or semantically malformed input data; carries the 1-based
/// line number when the problem is tied to one line (0 otherwise).
class IoFormatError : public TrackerError {
public:
    IoFormatError(const std::string& msg, int line)
        : TrackerError(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_number(line) {}
    int line_number = 0;
};

}  // namespace wintrack
