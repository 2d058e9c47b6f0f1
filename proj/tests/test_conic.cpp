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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "secnoma/conic.hpp"

using namespace secnoma;

namespace {

RVector unit(int n, int i, double v = 1.0) {
  RVector a = RVector::Zero(n);
  a(i) = v;
  return a;
}

}  // namespace

TEST_CASE("bounded scalar lp solves to its vertex") {
  ConicProgram p(1);
  p.cost()(0) = 1.0;
  p.add_affine(unit(1, 0, -1.0), -1.0, "lb");  // x >= 1
  p.add_affine(unit(1, 0, 1.0), 3.0, "ub");    // x <= 3
  BarrierSolver s;
  BarrierSettings st;
  st.gap_abs = 1e-11;
  const ConeSolution sol = s.solve(p, nullptr, st);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("contradictory bounds are reported infeasible") {
  ConicProgram p(1);
  p.cost()(0) = 1.0;
  p.add_affine(unit(1, 0, -1.0), -1.0, "x >= 1");
  p.add_affine(unit(1, 0, 1.0), 0.0, "x <= 0");
  const ConeSolution sol = BarrierSolver().solve(p, nullptr, {});
  REQUIRE(sol.status == SolveStatus::infeasible);
  CHECK(sol.infeasibility > 0.2);  // the true residual violation is 0.5
}

TEST_CASE("exponential row pins u = e^v at the bound") {
  ConicProgram p(2);  // (u, v)
  p.cost()(0) = 1.0;
  p.add_exp(unit(2, 0), 0.0, unit(2, 1), 0.0, "u >= e^v");
  p.add_affine(unit(2, 1, -1.0), -1.0, "v >= 1");
  BarrierSettings st;
  st.gap_abs = 1e-11;
  const ConeSolution sol = BarrierSolver().solve(p, nullptr, st);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(std::exp(1.0)).epsilon(1e-7));
}

TEST_CASE("psd block: min trace subject to a rank-one floor") {
  // min Tr(W) s.t. Tr(W hh') >= 1  ->  1/|h|^2
  const int n = 3;
  Rng rng(7);
  const CVector h = rng.cgauss_vector(n, 1.0);
  ConicProgram p(n * n);
  p.add_block(0, n, "W");
  for (int j = 0; j < n; ++j) p.cost()((j + 1) * (j + 1) - 1) = 1.0;
  RVector a = -pack_hermitian(h * h.adjoint());
  p.add_affine(std::move(a), -1.0, "signal floor");
  BarrierSettings st;
  st.gap_abs = 1e-12;
  const ConeSolution sol = BarrierSolver().solve(p, nullptr, st);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(1.0 / h.squaredNorm()).epsilon(1e-7));
}

TEST_CASE("mixed cones with separable optimum") {
  // min Tr(W) + u  s.t. Tr(W hh') >= 2, u >= e^v, v >= ln 3
  const int n = 2;
  Rng rng(21);
  const CVector h = rng.cgauss_vector(n, 1.0);
  const int nv = n * n + 2;
  ConicProgram p(nv);
  p.add_block(0, n, "W");
  for (int j = 0; j < n; ++j) p.cost()((j + 1) * (j + 1) - 1) = 1.0;
  p.cost()(n * n) = 1.0;  // u
  RVector a = RVector::Zero(nv);
  a.head(n * n) = -pack_hermitian(h * h.adjoint());
  p.add_affine(std::move(a), -2.0, "signal floor");
  p.add_exp(unit(nv, n * n), 0.0, unit(nv, n * n + 1), 0.0, "u >= e^v");
  p.add_affine(unit(nv, n * n + 1, -1.0), -std::log(3.0), "v floor");
  BarrierSettings st;
  st.gap_abs = 1e-11;
  const ConeSolution sol = BarrierSolver().solve(p, nullptr, st);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(2.0 / h.squaredNorm() + 3.0).epsilon(1e-6));
}

TEST_CASE("fast schur path agrees with the dense fallback") {
  // random mixed program exercising both Newton solvers
  Rng rng(99);
  const int n = 3;
  const int nv = n * n + 3;
  ConicProgram p(nv);
  p.add_block(0, n, "W");
  for (int j = 0; j < n; ++j) p.cost()((j + 1) * (j + 1) - 1) = 1.0;
  p.cost()(n * n) = 0.5;
  for (int r = 0; r < 4; ++r) {
    const CVector h = rng.cgauss_vector(n, 1.0);
    RVector a = RVector::Zero(nv);
    a.head(n * n) = -pack_hermitian(h * h.adjoint());
    a(n * n) = -0.1 * rng.uniform();
    p.add_affine(std::move(a), -(0.5 + rng.uniform()), "floor" + std::to_string(r));
  }
  RVector u = unit(nv, n * n), v = unit(nv, n * n + 1);
  u(n * n + 2) = 0.3;
  p.add_exp(std::move(u), 0.1, std::move(v), 0.0, "cone");
  p.add_affine(unit(nv, n * n + 1, -1.0), -0.2, "v floor");
  p.add_affine(unit(nv, n * n + 2, -1.0), 0.0, "w nonneg");
  p.add_affine(unit(nv, n * n + 2, 1.0), 2.0, "w cap");

  BarrierSettings fast, dense;
  fast.gap_abs = dense.gap_abs = 1e-11;
  fast.use_schur_fast_path = true;
  dense.use_schur_fast_path = false;
  const ConeSolution a = BarrierSolver().solve(p, nullptr, fast);
  const ConeSolution b = BarrierSolver().solve(p, nullptr, dense);
  REQUIRE(a.status == SolveStatus::optimal);
  REQUIRE(b.status == SolveStatus::optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
}

TEST_CASE("solutions respect the requested gap accuracy") {
  // scaled copies of the scalar lp: optimum known exactly
  for (double scale : {1.0, 1e-3, 1e3}) {
    ConicProgram p(1);
    p.cost()(0) = 1.0;
    p.add_affine(unit(1, 0, -1.0), -scale, "lb");
    p.add_affine(unit(1, 0, 1.0), 10.0 * scale, "ub");
    BarrierSettings st;
    st.gap_abs = 1e-10 * std::max(scale, 1.0);
    st.gap_accept = 10 * st.gap_abs;
    const ConeSolution sol = BarrierSolver().solve(p, nullptr, st);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(std::abs(sol.objective - scale) <= 10 * st.gap_abs);
    CHECK(sol.gap_bound <= st.gap_accept);
    CHECK(sol.objective >= scale - 1e-15 * scale);  // interior iterates stay feasible
  }
}

TEST_CASE("program dump lists blocks rows and cones") {
  ConicProgram p(4);
  p.add_block(0, 2, "W");
  p.add_affine(unit(4, 0), 1.0, "cap");
  p.add_exp(unit(4, 1), 0.0, unit(4, 2), 0.0, "cone");
  std::ostringstream os;
  p.dump(os);
  const std::string s = os.str();
  CHECK(s.find("W") != std::string::npos);
  CHECK(s.find("cap") != std::string::npos);
  CHECK(s.find("cone") != std::string::npos);
  CHECK(s.find("4 variables") != std::string::npos);
}
