/*
 * Copyright 2026 The Affect Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
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

namespace affect {

/// Coarse failure classes. The CLI maps them onto exit codes 2/3/4.
enum class ErrorKind { config, data, numeric };

/// Single exception type for the library. `code()` carries the specific
/// condition name (e.g. "MissingColumn", "NonFiniteLoss") so callers and
/// tests can match on it without a deep class hierarchy.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string code, const std::string &message)
        : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string &code() const noexcept { return code_; }

  private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void throw_config(std::string code, const std::string &message) {
    throw Error(ErrorKind::config, std::move(code), message);
}

[[noreturn]] inline void throw_data(std::string code, const std::string &message) {
    throw Error(ErrorKind::data, std::move(code), message);
}

[[noreturn]] inline void throw_numeric(std::string code, const std::string &message) {
    throw Error(ErrorKind::numeric, std::move(code), message);
}

}  // namespace affect
