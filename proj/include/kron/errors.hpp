#pragma once

#include <stdexcept>
#include <string>

namespace kron {

// Base class for all validation failures raised by this library.
class model_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter lies outside [0, 1].
class range_violation final : public model_error {
 public:
  using model_error::model_error;
};

// The gamma <= beta <= alpha ordering is broken.
class ordering_violation final : public model_error {
 public:
  using model_error::model_error;
};

// A parameter is NaN or infinite.
class nonfinite_input final : public model_error {
 public:
  using model_error::model_error;
};

// Two labels (or a label and a parameter set) disagree on bit length.
class length_mismatch final : public model_error {
 public:
  using model_error::model_error;
};

// A pair signature whose parts do not add up to the label length.
class invalid_signature final : public model_error {
 public:
  using model_error::model_error;
};

// A vertex weight outside [0, k].
class weight_out_of_range final : public model_error {
 public:
  using model_error::model_error;
};

// k exceeds the limit of an enumeration-based oracle.
class oracle_too_large final : public model_error {
 public:
  using model_error::model_error;
};

// k exceeds a sampler cap, or a sample would not fit in memory.
class sample_too_large final : public model_error {
 public:
  using model_error::model_error;
};

// A signature class produced more members than can be materialized.
class class_overflow final : public model_error {
 public:
  using model_error::model_error;
};

// File or stream level failure when reading/writing graph data.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed content in an otherwise readable stream.
class parse_error final : public io_error {
 public:
  using io_error::io_error;
};

}  // namespace kron
