// Copyright 2026 The dpmark Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace dpmark {

// Input data violates the declared schema (unknown label, bad cell, ...).
// The CLI maps this to exit code 3.
class schema_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural corruption: duplicate primary keys, mismatched record widths,
// unaligned key sets between two databases. CLI exit code 3.
class integrity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter out of range or an inconsistent flag combination. CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested cumulative privacy budget cannot be met. Carries the largest
// per-release epsilon that would still be feasible. CLI exit code 4.
class budget_infeasible_error : public std::runtime_error {
 public:
  budget_infeasible_error(const std::string& what, double max_feasible_epsilon)
      : std::runtime_error(what), max_feasible_epsilon_(max_feasible_epsilon) {}

  double max_feasible_epsilon() const noexcept { return max_feasible_epsilon_; }

 private:
  double max_feasible_epsilon_;
};

}  // namespace dpmark
