// Copyright 2026 The ulasso Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace ulasso {

/// Failure categories. The C API maps each one onto a status code.
enum class ErrorKind {
    domain,              ///< argument outside the operation's domain
    degenerate_tails,    ///< lower and upper tail thresholds coincide
    degenerate_design,   ///< no correlation between response and design
    precondition,        ///< required input (e.g. labels) missing
    assumption_violated, ///< a structural assumption on (beta0, alpha0) fails
    parse,               ///< malformed input file
    io,                  ///< file system failure
    config,              ///< invalid experiment configuration
    aborted,             ///< too many failed replications
};

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const char* what)
{
    if (!cond) throw Error(kind, what);
}

} // namespace ulasso
