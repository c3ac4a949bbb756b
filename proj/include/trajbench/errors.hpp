// Copyright 2026 The trajbench Authors
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

#ifndef TRAJBENCH__ERRORS_HPP_
#define TRAJBENCH__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace trajbench
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Malformed, inconsistent or missing scene data.
class DataError : public Error
{
public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingDivergence : public Error
{
public:
  using Error::Error;
};

/// File system failures and corrupt files.
class IoError : public Error
{
public:
  using Error::Error;
};

}  // namespace trajbench

#endif  // TRAJBENCH__ERRORS_HPP_
