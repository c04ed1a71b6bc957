/*
 * Copyright 2026 The polyhe Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace polyhe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model file or JSON document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A graph or parameter invariant does not hold. Carries the offending node
/// id when one is known (-1 otherwise).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, int node_id = -1)
      : Error(node_id >= 0 ? "node " + std::to_string(node_id) + ": " + what
                           : what),
        node_id_(node_id) {}
  int node_id() const { return node_id_; }

 private:
  int node_id_;
};

/// Input does not match the expected tensor shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A rewrite was requested on a subgraph that does not have the expected form.
class PatternError : public Error {
 public:
  using Error::Error;
};

/// Weight redistribution cannot be applied (no receiver, zero or complex
/// update term).
class RedistributionError : public Error {
 public:
  using Error::Error;
};

/// Graph node forms are inconsistent with the requested strategy.
class StrategyError : public Error {
 public:
  using Error::Error;
};

/// A rescale was required but no modulus is left on the ciphertext.
class DepthExhaustedError : public Error {
 public:
  using Error::Error;
};

/// Slot layouts of operands are incompatible.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// The requested packing does not fit into the slot vector.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Executed instruction disagrees with the scale/level bookkeeping recorded
/// by the compiler.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

}  // namespace polyhe
