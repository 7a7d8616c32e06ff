#pragma once

#include <stdexcept>
#include <string>

namespace rdpp {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Text normalized to nothing (tokenize) or an empty caption where one is required.
class EmptyCaptionError : public Error {
 public:
  using Error::Error;
};

/// Caption set of size zero handed to a set-level metric.
class EmptySetError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between vectors/matrices, or an invalid subset index.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Matrix expected to be symmetric is not, beyond tolerance.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Matrix inversion failed even after ridge regularization.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Ground set or sequence space too large to enumerate.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Token outside the policy vocabulary.
class VocabError : public Error {
 public:
  using Error::Error;
};

/// Malformed data file (corpus, checkpoint, report).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdpp
