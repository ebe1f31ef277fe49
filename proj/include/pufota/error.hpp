// Copyright 2026 The pufota Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pufota {

// Base of every error raised by the library. Protocol-level rejections are
// not errors; they are reported through actors::RejectCause.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration (bad width, empty topology, unknown profile, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or checksum-failing wire data or file contents.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// A frame's profile field disagrees with the profile the receiver runs.
class NegotiationError : public DecodeError {
 public:
  using DecodeError::DecodeError;
};

// AEAD tag verification failed.
class AuthError : public Error {
 public:
  using Error::Error;
};

// Fuzzy extractor could not reproduce a key.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

// Unknown model id, missing firmware, etc.
class LookupError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pufota
