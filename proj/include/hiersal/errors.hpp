#ifndef HIERSAL_ERRORS_HPP
#define HIERSAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hiersal {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File missing or unreadable.
class IoError : public Error {
public:
    using Error::Error;
};

// File exists but cannot be decoded.
class FormatError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

// Region models of different kinds compared or merged.
class KindMismatch : public Error {
public:
    using Error::Error;
};

class EmptyGroundTruth : public Error {
public:
    using Error::Error;
};

// Evaluation pair with no matching file stem.
class MissingPair : public Error {
public:
    using Error::Error;
};

} // namespace hiersal

#endif
