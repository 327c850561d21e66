/*
 * Copyright 2026 The hsnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
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

namespace hsnn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Handshake protocol misuse: duplicate initMsg, ack without request, ...
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Invalid structural configuration (zero buffer depth, unknown unit kind, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An event scheduled in the past, or a zero delay on a non-self target.
class CausalityError : public Error {
public:
    using Error::Error;
};

/// No virtual-time progress over the configured event window.
class LivelockError : public Error {
public:
    using Error::Error;
};

/// User-supplied input failed validation. The CLI maps this to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace hsnn
