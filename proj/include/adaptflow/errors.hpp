/*
 * Copyright 2026 The AdaptFlow Authors
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

#ifndef ADAPTFLOW_ERRORS_HPP
#define ADAPTFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adaptflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model document. Carries 1-based line/column of the offending byte.
class SyntaxError : public Error
{
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
    : Error("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line), column_(column)
    { }

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A well-formed document that violates a model invariant. `element` names the culprit.
class ValidationError : public Error
{
public:
    ValidationError(const std::string& element, const std::string& what)
    : Error("validation error in " + element + ": " + what), element_(element)
    { }

    const std::string& element() const { return element_; }

private:
    std::string element_;
};

class NotFound : public Error
{
public:
    using Error::Error;
};

class TransformError : public Error
{
public:
    using Error::Error;
};

/// Proposition violating a context-model typing rule (e.g. component bound to component).
class TypeError : public Error
{
public:
    using Error::Error;
};

class PreconditionFailed : public Error
{
public:
    using Error::Error;
};

class ArityError : public Error
{
public:
    using Error::Error;
};

class DanglingReference : public Error
{
public:
    using Error::Error;
};

class DuplicateBinding : public Error
{
public:
    using Error::Error;
};

class MissingLeafValue : public Error
{
public:
    explicit MissingLeafValue(const std::string& service)
    : Error("missing QoS values for service '" + service + "'"), service_(service)
    { }

    const std::string& service() const { return service_; }

private:
    std::string service_;
};

class NoViableOption : public Error
{
public:
    using Error::Error;
};

class ChainDepthExceeded : public Error
{
public:
    using Error::Error;
};

class SimulationError : public Error
{
public:
    using Error::Error;
};

} // namespace adaptflow

#endif // ADAPTFLOW_ERRORS_HPP
