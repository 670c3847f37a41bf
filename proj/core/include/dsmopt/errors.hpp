// Copyright 2026 The dsmopt Authors
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

namespace dsmopt {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DSMOPT_DECLARE_ERROR(Name)           \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

// timeseries
DSMOPT_DECLARE_ERROR(RowCountMismatch);
DSMOPT_DECLARE_ERROR(MalformedRow);
DSMOPT_DECLARE_ERROR(NegativeValue);
DSMOPT_DECLARE_ERROR(InvalidValue);
DSMOPT_DECLARE_ERROR(OffGridLabel);
DSMOPT_DECLARE_ERROR(OutOfHorizon);

// scenario
DSMOPT_DECLARE_ERROR(ParseError);
DSMOPT_DECLARE_ERROR(UnknownSeriesRef);

// solver
DSMOPT_DECLARE_ERROR(NumericalBreakdown);
DSMOPT_DECLARE_ERROR(TooManyBinaries);

// schedule
DSMOPT_DECLARE_ERROR(StatusNotOptimal);
DSMOPT_DECLARE_ERROR(GridMismatch);

// retrieval
DSMOPT_DECLARE_ERROR(EmptyCorpus);
DSMOPT_DECLARE_ERROR(DimMismatch);
DSMOPT_DECLARE_ERROR(EmptyIndex);
DSMOPT_DECLARE_ERROR(BackendUnavailable);
DSMOPT_DECLARE_ERROR(IndexFormatError);

#undef DSMOPT_DECLARE_ERROR

}  // namespace dsmopt
