////////////////////////////////////////////////////////////////////////////////
//                                                                            //
//  This file is part of quasidiff                                            //
//                                                                            //
//  Copyright 2026 quasidiff developers                                       //
//                                                                            //
//  Licensed under the Apache License, Version 2.0 (the "License");           //
//  you may not use this file except in compliance with the License.          //
//  You may obtain a copy of the License at                                   //
//                                                                            //
//      http://www.apache.org/licenses/LICENSE-2.0                            //
//                                                                            //
//  Unless required by applicable law or agreed to in writing, software       //
//  distributed under the License is distributed on an "AS IS" BASIS,         //
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  //
//  See the License for the specific language governing permissions and       //
//  limitations under the License.                                            //
//                                                                            //
////////////////////////////////////////////////////////////////////////////////

#ifndef QUASIDIFF_ERROR_HPP
#define QUASIDIFF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace quasidiff {

  // Exception hierarchy. The C API maps each class onto a stable status code
  // (see quasidiff.h), which the CLI turns into its exit code.
  class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  // Bad input: violated preconditions, malformed files, unknown names.
  class ValidationError : public Error {
  public:
    using Error::Error;
  };

  // An enumeration or allocation would exceed a configured cap.
  class ResourceError : public Error {
  public:
    using Error::Error;
  };

  // A numerical self-check failed (e.g. an autocorrelation bin collision).
  class NumericalError : public Error {
  public:
    using Error::Error;
  };

  namespace detail {
    [[noreturn]] inline void fail_validation(const std::string& msg) { throw ValidationError(msg); }
  }

}

#define QD_REQUIRE(cond, msg)                                                   \
  do {                                                                          \
    if (!(cond))                                                                \
      ::quasidiff::detail::fail_validation(msg);                                \
  } while (0)

#endif
