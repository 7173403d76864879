#pragma once

#include <stdexcept>
#include <string>

namespace supertml {

// Maps onto the CLI exit codes: usage = 1, data = 2, io = 3.
enum class ErrorKind { Usage = 1, Data = 2, Io = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

/// Raised by the planners when no layout satisfies the legibility floor.
class InfeasibleLayout : public DataError {
public:
    using DataError::DataError;
};

/// A string did not fit the cell it was assigned to (plan/budget mismatch).
class RenderOverflow : public DataError {
public:
    using DataError::DataError;
};

/// A manifest or plan on disk no longer matches its recorded digest.
class IntegrityError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace supertml
