// Copyright 2026 The qladder Authors
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

namespace qladder {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidDimensionError : Error {
    using Error::Error;
};
struct ShapeMismatchError : Error {
    using Error::Error;
};
struct OutOfRegimeError : Error {
    using Error::Error;
};
struct SingularityError : Error {
    using Error::Error;
};
struct UndefinedAngleError : Error {
    using Error::Error;
};
struct DegeneratePairError : Error {
    using Error::Error;
};
struct MultichromaticError : Error {
    using Error::Error;
};
struct StepSizeError : Error {
    using Error::Error;
};
struct NoResonanceError : Error {
    using Error::Error;
};
struct DiabaticTrackingError : Error {
    using Error::Error;
};

// Carries the fit residual so callers can report it.
struct PoorFitError : Error {
    double residual;
    PoorFitError(const std::string& what, double res) : Error(what), residual(res) {}
};

struct SearchExhaustedError : Error {
    std::size_t frontier_size;
    SearchExhaustedError(const std::string& what, std::size_t frontier)
        : Error(what), frontier_size(frontier) {}
};
struct NotSynthesizableError : Error {
    using Error::Error;
};
struct SingularMatrixError : Error {
    using Error::Error;
};
struct NonPhysicalStateError : Error {
    using Error::Error;
};
struct AmbiguousPurificationError : Error {
    using Error::Error;
};
struct NotInformationallyCompleteError : Error {
    using Error::Error;
};
struct UndefinedFidelityError : Error {
    using Error::Error;
};
struct UnfittableError : Error {
    using Error::Error;
};
struct KernelSolveError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace qladder
