/*
 * Copyright 2026 The obfusc Authors
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

namespace obfusc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caused by bad input: malformed data, invalid configuration, missing
/// prerequisites. The CLI maps these to exit status 1.
class UserError : public Error {
public:
    using Error::Error;
};

class DataError : public UserError {
public:
    using UserError::UserError;
};

class ConfigError : public UserError {
public:
    using UserError::UserError;
};

/// A pipeline stage was asked to run before the artifacts it reads exist.
class DependencyError : public UserError {
public:
    using UserError::UserError;
};

/// Feature-schema or model-schema disagreement.
class SchemaMismatch : public UserError {
public:
    using UserError::UserError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace obfusc
