// Copyright 2026 The Vipseval Authors.
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

#ifndef VIPSEVAL_ERROR_HPP
#define VIPSEVAL_ERROR_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace vipseval {

// Failure classes, kept coarse so the C boundary and the CLI can map them
// to stable status/exit codes.
enum class ErrorKind {
  kUsage,     // caller passed arguments that can never be valid
  kData,      // input violates a documented invariant
  kIo,        // filesystem / decode failure
  kInternal,  // broken internal assumption
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
template <class... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}
}  // namespace detail

template <class... Parts>
[[noreturn]] void throw_usage(const Parts&... parts) {
  throw Error(ErrorKind::kUsage, detail::concat(parts...));
}

template <class... Parts>
[[noreturn]] void throw_data(const Parts&... parts) {
  throw Error(ErrorKind::kData, detail::concat(parts...));
}

template <class... Parts>
[[noreturn]] void throw_io(const Parts&... parts) {
  throw Error(ErrorKind::kIo, detail::concat(parts...));
}

template <class... Parts>
[[noreturn]] void throw_internal(const Parts&... parts) {
  throw Error(ErrorKind::kInternal, detail::concat(parts...));
}

}  // namespace vipseval

#endif  // VIPSEVAL_ERROR_HPP
