// Copyright 2026 The modaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MODAUDIT_ERRORS_H_
#define MODAUDIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace modaudit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid FilterConfig, RateConfig, RunConfig or missing active entry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Category without a registered criterion mapping.
class MappingError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class IngestionError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class ScoringError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace modaudit

#endif  // MODAUDIT_ERRORS_H_
