/*
 *  Copyright (C) 2026 The revmekf authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revmekf
{

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (maps to CLI exit code 2).
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Bad or inconsistent input data (maps to CLI exit code 3).
class DataError : public Error
{
public:
  using Error::Error;
};

class InvalidQuaternion : public Error
{
public:
  using Error::Error;
};

/// Rotation axis is undefined because the two input vectors are antiparallel.
class AmbiguousRotation : public Error
{
public:
  using Error::Error;
};

class SingularInnovation : public Error
{
public:
  using Error::Error;
};

/// The plane constraint has no solution for this sample.
class NoIntersection : public Error
{
public:
  using Error::Error;
};

class TraceMismatch : public DataError
{
public:
  using DataError::DataError;
};

class MissingColumn : public DataError
{
public:
  using DataError::DataError;
};

class CoverageGap : public DataError
{
public:
  using DataError::DataError;
};

/// Data error tied to a 1-based line of an input file.
class LineError : public DataError
{
public:
  LineError(const std::string& what, std::size_t line)
    : DataError(what + " (line " + std::to_string(line) + ")"), m_line(line)
  {
  }

  std::size_t line() const { return m_line; }

private:
  std::size_t m_line;
};

class ParseError : public LineError
{
public:
  using LineError::LineError;
};

class NonMonotonicTime : public LineError
{
public:
  using LineError::LineError;
};

} // namespace revmekf
