// Copyright 2025 The memplan Authors
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

#ifndef MEMPLAN_ERRORS_HPP_
#define MEMPLAN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace memplan {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define MEMPLAN_DEFINE_ERROR(NAME)                              \
  class NAME : public Error {                                   \
   public:                                                      \
    explicit NAME(const std::string& what)                      \
        : Error(std::string(#NAME) + ": " + what) {}            \
  }

// File and text-format errors.
MEMPLAN_DEFINE_ERROR(ParseError);

// Graph construction errors.
MEMPLAN_DEFINE_ERROR(CycleDetected);
MEMPLAN_DEFINE_ERROR(DanglingEndpoint);
MEMPLAN_DEFINE_ERROR(DuplicateId);
MEMPLAN_DEFINE_ERROR(ControlEdgeWithSize);
// Structural violations without a dedicated name above: data edges of size
// zero, role=source nodes with fanin.
MEMPLAN_DEFINE_ERROR(InvalidStructure);

// Generator errors.
MEMPLAN_DEFINE_ERROR(InvalidSpec);

// Encoder errors.
MEMPLAN_DEFINE_ERROR(InfeasibleBounds);

// Assignment evaluation errors.
MEMPLAN_DEFINE_ERROR(UnassignedVariable);

// Solver errors.
MEMPLAN_DEFINE_ERROR(TooLarge);
MEMPLAN_DEFINE_ERROR(SolverProcessFailed);
MEMPLAN_DEFINE_ERROR(SolutionParseError);
MEMPLAN_DEFINE_ERROR(SolutionInfeasible);
MEMPLAN_DEFINE_ERROR(Timeout);

// Simulation errors.
MEMPLAN_DEFINE_ERROR(InvalidOrder);

// Decoder errors; raised when a solution that passed the model checks still
// decodes to a non-topological sequence, which indicates an encoder bug.
MEMPLAN_DEFINE_ERROR(NonTopological);

// Allocation-request mapping errors.
MEMPLAN_DEFINE_ERROR(MultiOutputUnsupported);
MEMPLAN_DEFINE_ERROR(NoOutputEdge);

// Oracle errors.
MEMPLAN_DEFINE_ERROR(BudgetExceeded);

#undef MEMPLAN_DEFINE_ERROR

}  // namespace memplan

#endif  // MEMPLAN_ERRORS_HPP_
