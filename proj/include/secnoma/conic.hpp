// secnoma - secure beamforming simulator for MISO-NOMA cognitive radio downlinks with SWIPT
// Copyright (C) 2026 the secnoma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "secnoma/common.hpp"

namespace secnoma {

// Conic program over a real variable vector x:
//
//   minimize    cost' x
//   subject to  a' x <= rhs                    (affine rows)
//               u' x + u0 >= exp(v' x + v0)    (exponential rows)
//               mat_b(x) Hermitian PSD         (matrix blocks)
//
// Matrix blocks are contiguous ranges of x holding the isometric Hermitian
// packing from common.hpp, so a trace term Tr(W H) is the affine coefficient
// vector pack_hermitian(H) on that range.

struct AffineRow {
  RVector a;
  double rhs = 0.0;
  std::string tag;
};

struct ExpRow {
  RVector u;
  double u0 = 0.0;
  RVector v;
  double v0 = 0.0;
  std::string tag;
};

struct MatrixBlock {
  int offset = 0;
  int dim = 0;
  std::string tag;
};

class ConicProgram {
public:
  explicit ConicProgram(int nvars) : nvars_(nvars), cost_(RVector::Zero(nvars)) {}

  int nvars() const { return nvars_; }
  RVector &cost() { return cost_; }
  const RVector &cost() const { return cost_; }

  void add_affine(RVector a, double rhs, std::string tag);
  void add_exp(RVector u, double u0, RVector v, double v0, std::string tag);
  void add_block(int offset, int dim, std::string tag);

  const std::vector<AffineRow> &affine() const { return rows_; }
  const std::vector<ExpRow> &exp_rows() const { return exps_; }
  const std::vector<MatrixBlock> &blocks() const { return blocks_; }

  // total barrier parameter (1 per affine row, 2 per exp row, dim per block)
  double barrier_nu() const;

  // most violated normalized constraint at x (<= 0 when strictly feasible);
  // exp rows use log-domain residuals so this never overflows
  double max_violation(const RVector &x) const;

  // human-readable dump: id -> tag -> dimensions (debug aid)
  void dump(std::ostream &os) const;

private:
  int nvars_;
  RVector cost_;
  std::vector<AffineRow> rows_;
  std::vector<ExpRow> exps_;
  std::vector<MatrixBlock> blocks_;
};

enum class SolveStatus { optimal, infeasible, numeric_failure };

const char *to_string(SolveStatus s);

struct ConeSolution {
  SolveStatus status = SolveStatus::numeric_failure;
  RVector x;
  double objective = 0.0;
  double gap_bound = 0.0;      // certified suboptimality bound at the returned point
  int newton_steps = 0;
  double infeasibility = 0.0;  // best achieved uniform slack when infeasible
  // well-centered midpath iterate; a strong warm start for reoptimization
  RVector interior_hint;
  double interior_hint_t = 0.0;  // path parameter the hint was centered at
  std::string message;
};

struct BarrierSettings {
  double gap_abs = 3e-10;        // target absolute suboptimality of the objective
  double gap_accept = 1e-9;      // stall acceptance bound (conditioning limit)
  double t_init = 1.0;           // initial path parameter
  double t_mult = 12.0;          // path parameter growth per centering stage
  double center_tol = 0.25;      // squared Newton decrement threshold per stage
  int max_newton = 800;          // global Newton step budget per phase
  int max_inner = 60;            // Newton steps per centering stage
  double phase1_done = 1e-7;     // uniform slack proving strict feasibility
  double warm_t = 0.0;           // resume path parameter for interior warm starts
  bool use_schur_fast_path = true;  // low-rank solve; dense fallback on failure
};

// Backend interface for solving the subproblems; selectable by config key.
class ConeSolver {
public:
  virtual ~ConeSolver() = default;
  virtual ConeSolution solve(const ConicProgram &prog, const RVector *start,
                             const BarrierSettings &settings) const = 0;
  virtual std::string name() const = 0;
};

// Primal log-barrier interior-point method:
// -log slack on affine rows, -log(log u - v) - log u on exponential rows,
// -log det on matrix blocks; infeasible starts are handled by a phase-I
// minimization of a uniform violation variable.
class BarrierSolver final : public ConeSolver {
public:
  ConeSolution solve(const ConicProgram &prog, const RVector *start,
                     const BarrierSettings &settings) const override;
  std::string name() const override { return "barrier"; }
};

std::unique_ptr<ConeSolver> make_cone_solver(const std::string &key);

}  // namespace secnoma
