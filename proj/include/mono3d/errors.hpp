#pragma once

#include <stdexcept>
#include <string>

namespace mono3d {

// Bad user input: malformed files, out-of-range parameters, missing paths.
// The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Carries the offending field name in the message.
class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidFov : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidResolution : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidInput : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A run that was configured correctly but could not produce an estimate.
// The CLI maps these to exit code 1.
class AlgorithmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDetections : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

// Per-viewpoint likelihood field is zero everywhere (nothing observable).
class DegenerateField : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

// Posterior vanished after multiplying in a viewpoint: the new field's
// support is disjoint from the surviving cells. Unrecoverable.
class DegeneratePosterior : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class InsufficientViewpoints : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class NoSurvivors : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class TooFewPoints : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class EmptyCluster : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class ZeroWeightSum : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class NoDetections : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class CountMismatch : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class EmptyInput : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

// Parallel execution changed the filter output. Always a bug; never ignored.
class NondeterministicOutput : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

}  // namespace mono3d
