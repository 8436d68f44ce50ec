// Copyright 2026 The corpusforge Authors.
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

#ifndef CORPUSFORGE_ERROR_HPP_
#define CORPUSFORGE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace corpusforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed tag, record or input line.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid settings; reported before any input is touched.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A perturbation kind needs a lexicon list or trie that is not loaded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// An edit log that does not fit the text it claims to describe.
class CorruptLogError : public Error {
 public:
  using Error::Error;
};

// Translator or scorer backend failure. Retriable unless stated otherwise.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace corpusforge

#endif  // CORPUSFORGE_ERROR_HPP_
