#pragma once

#include <stdexcept>
#include <string>

namespace ssmgan {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value does not fit its declared field or index range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Malformed bytes: wrong length, bad magic, truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Tensor or frame shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A streaming state was driven with a spec or bank it does not belong to.
class StateError : public Error {
 public:
  using Error::Error;
};

// Configuration or weight store fails validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Broken internal invariant (e.g. upsampler phase misalignment).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssmgan
