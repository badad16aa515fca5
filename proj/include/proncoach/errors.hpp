// Copyright 2026 The proncoach Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRONCOACH_ERRORS_HPP_
#define PRONCOACH_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace proncoach {

/// Base of every error thrown by the library. `kind()` is the stable,
/// machine-readable name that the service and CLI put on the wire.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define PRONCOACH_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  }

// arabic text
PRONCOACH_DEFINE_ERROR(MalformedText);
PRONCOACH_DEFINE_ERROR(UnknownSymbol);
// content store
PRONCOACH_DEFINE_ERROR(ParseError);
PRONCOACH_DEFINE_ERROR(MissingAsset);
PRONCOACH_DEFINE_ERROR(NotFound);
PRONCOACH_DEFINE_ERROR(EmptyCorpus);
// scoring
PRONCOACH_DEFINE_ERROR(InconsistentAlignment);
PRONCOACH_DEFINE_ERROR(OutOfRange);
PRONCOACH_DEFINE_ERROR(Inconsistent);
// acoustic
PRONCOACH_DEFINE_ERROR(UnsupportedFormat);
PRONCOACH_DEFINE_ERROR(CorruptFile);
PRONCOACH_DEFINE_ERROR(TooShort);
PRONCOACH_DEFINE_ERROR(EmptyFeatures);
PRONCOACH_DEFINE_ERROR(InvalidRates);

#undef PRONCOACH_DEFINE_ERROR

/// Raised by corpus validation; carries the offending item id.
class ValidationError : public Error {
 public:
  ValidationError(std::string item_id, const std::string& reason)
      : Error("ValidationError", item_id + ": " + reason),
        item_id_(std::move(item_id)),
        reason_(reason) {}
  const std::string& item_id() const noexcept { return item_id_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string item_id_;
  std::string reason_;
};

}  // namespace proncoach

#endif  // PRONCOACH_ERRORS_HPP_
