// Copyright 2026 The Cheshire Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace cheshire {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter outside its physical or numerical domain (T <= 0, alpha = 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Pre- and postselected states are (numerically) orthogonal, so the weak
/// value is undefined: postselection never succeeds.
class OrthogonalSelection : public Error {
 public:
  using Error::Error;
};

/// The fringe fit cannot be solved from the supplied interferogram.
class FitDegenerate : public Error {
 public:
  using Error::Error;
};

}  // namespace cheshire
