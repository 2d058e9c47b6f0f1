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

#include "secnoma/conic.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <ostream>

namespace secnoma {

void ConicProgram::add_affine(RVector a, double rhs, std::string tag) {
  rows_.push_back({std::move(a), rhs, std::move(tag)});
}

void ConicProgram::add_exp(RVector u, double u0, RVector v, double v0, std::string tag) {
  exps_.push_back({std::move(u), u0, std::move(v), v0, std::move(tag)});
}

void ConicProgram::add_block(int offset, int dim, std::string tag) {
  blocks_.push_back({offset, dim, std::move(tag)});
}

double ConicProgram::barrier_nu() const {
  double nu = static_cast<double>(rows_.size()) + 2.0 * static_cast<double>(exps_.size());
  for (const auto &b : blocks_) nu += b.dim;
  return nu;
}

double ConicProgram::max_violation(const RVector &x) const {
  double viol = -std::numeric_limits<double>::infinity();
  for (const auto &r : rows_) viol = std::max(viol, r.a.dot(x) - r.rhs);
  for (const auto &e : exps_) {
    const double u = e.u.dot(x) + e.u0;
    const double v = e.v.dot(x) + e.v0;
    const double ev = (v < 690.0) ? std::exp(v) : std::numeric_limits<double>::infinity();
    viol = std::max(viol, ev - u);
  }
  for (const auto &b : blocks_) {
    const CMatrix w = unpack_hermitian(x.data() + b.offset, b.dim);
    const RVector ev = hermitian_eigenvalues(w);
    viol = std::max(viol, -ev(ev.size() - 1));
  }
  return viol;
}

void ConicProgram::dump(std::ostream &os) const {
  os << "conic program: " << nvars_ << " variables, " << rows_.size() << " affine rows, "
     << exps_.size() << " exponential rows, " << blocks_.size() << " psd blocks\n";
  int id = 0;
  for (const auto &b : blocks_)
    os << "  B" << id++ << "  " << b.tag << "  " << b.dim << "x" << b.dim << " @" << b.offset
       << "\n";
  id = 0;
  for (const auto &r : rows_) {
    const int nnz = (r.a.array().abs() > 0).count();
    os << "  A" << id++ << "  " << r.tag << "  nnz=" << nnz << " rhs=" << r.rhs << "\n";
  }
  id = 0;
  for (const auto &e : exps_) {
    const int nnz =
        (e.u.array().abs() > 0).count() + (e.v.array().abs() > 0).count();
    os << "  E" << id++ << "  " << e.tag << "  nnz=" << nnz << "\n";
  }
}

const char *to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    default: return "numeric-failure";
  }
}

namespace {

constexpr double kTiny = 1e-300;

// Hermitian basis element k of a dim-d block in pack order, represented as
// c e_a e_b^H + conj(c) e_b e_a^H.
struct BasisElem {
  int a, b;
  cplx c;
};

std::vector<BasisElem> make_basis(int d) {
  std::vector<BasisElem> basis;
  basis.reserve(d * d);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) {
      basis.push_back({i, j, cplx(inv_rt2, 0.0)});
      basis.push_back({i, j, cplx(0.0, inv_rt2)});
    }
    basis.push_back({j, j, cplx(0.5, 0.0)});
  }
  return basis;
}

struct Prepped {
  int n = 0;
  RVector cost;
  std::vector<AffineRow> rows;
  std::vector<ExpRow> exps;
  std::vector<MatrixBlock> blocks;
  double nu = 0.0;
  std::vector<int> scalar_idx;            // variables not inside any block
  std::vector<std::vector<BasisElem>> basis;  // per block
  bool trivially_infeasible = false;
  std::string message;
};

// Rescales every row to unit max coefficient (the log barrier is invariant
// up to constants, but the uniform phase-I relaxation and the feasibility
// evaluations need commensurable rows). Vacuous rows are dropped.
struct Normalized {
  ConicProgram prog;
  bool trivially_infeasible = false;
  std::string message;
};

Normalized normalize_program(const ConicProgram &p) {
  Normalized out{ConicProgram(p.nvars())};
  out.prog.cost() = p.cost();
  for (const auto &b : p.blocks()) out.prog.add_block(b.offset, b.dim, b.tag);
  for (const auto &r : p.affine()) {
    const double c = r.a.cwiseAbs().maxCoeff();
    if (c < kTiny) {
      if (r.rhs < 0.0) {
        out.trivially_infeasible = true;
        out.message = "constant row violated: " + r.tag;
      }
      continue;  // vacuous
    }
    out.prog.add_affine(r.a / c, r.rhs / c, r.tag);
  }
  for (const auto &e : p.exp_rows()) {
    const double c = std::max({e.u.cwiseAbs().maxCoeff(), std::abs(e.u0), kTiny});
    out.prog.add_exp(e.u / c, e.u0 / c, e.v, e.v0 - std::log(c), e.tag);
  }
  return out;
}

Prepped prepare(const ConicProgram &p) {
  Prepped t;
  t.n = p.nvars();
  t.cost = p.cost();
  t.blocks = p.blocks();
  for (const auto &r : p.affine()) {
    const double c = r.a.cwiseAbs().maxCoeff();
    if (c < kTiny) {
      if (r.rhs < 0.0) {
        t.trivially_infeasible = true;
        t.message = "constant row violated: " + r.tag;
      }
      continue;  // vacuous
    }
    t.rows.push_back({r.a / c, r.rhs / c, r.tag});
  }
  for (const auto &e : p.exp_rows()) {
    const double c = std::max({e.u.cwiseAbs().maxCoeff(), std::abs(e.u0), kTiny});
    t.exps.push_back({e.u / c, e.u0 / c, e.v, e.v0 - std::log(c), e.tag});
  }
  t.nu = static_cast<double>(t.rows.size()) + 2.0 * t.exps.size();
  std::vector<bool> in_block(t.n, false);
  for (const auto &b : t.blocks) {
    t.nu += b.dim;
    t.basis.push_back(make_basis(b.dim));
    for (int i = 0; i < b.dim * b.dim; ++i) in_block[b.offset + i] = true;
  }
  for (int i = 0; i < t.n; ++i)
    if (!in_block[i]) t.scalar_idx.push_back(i);
  return t;
}

struct Eval {
  bool ok = false;
  double barrier = 0.0;
  std::vector<double> slack;        // affine
  std::vector<double> uval, rval;   // exponential
  std::vector<CMatrix> w, s, l;     // block matrices, inverses, chol factors
};

bool eval_point(const Prepped &t, const RVector &x, bool with_inverse, Eval &e) {
  e.ok = false;
  e.barrier = 0.0;
  e.slack.assign(t.rows.size(), 0.0);
  e.uval.assign(t.exps.size(), 0.0);
  e.rval.assign(t.exps.size(), 0.0);
  e.w.assign(t.blocks.size(), CMatrix());
  e.s.assign(t.blocks.size(), CMatrix());
  e.l.assign(t.blocks.size(), CMatrix());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const double s = t.rows[i].rhs - t.rows[i].a.dot(x);
    if (!(s > 0.0)) return false;
    e.slack[i] = s;
    e.barrier -= std::log(s);
  }
  for (size_t i = 0; i < t.exps.size(); ++i) {
    const double u = t.exps[i].u.dot(x) + t.exps[i].u0;
    if (!(u > 0.0)) return false;
    const double r = std::log(u) - (t.exps[i].v.dot(x) + t.exps[i].v0);
    if (!(r > 0.0)) return false;
    e.uval[i] = u;
    e.rval[i] = r;
    e.barrier -= std::log(r) + std::log(u);
  }
  for (size_t b = 0; b < t.blocks.size(); ++b) {
    e.w[b] = unpack_hermitian(x.data() + t.blocks[b].offset, t.blocks[b].dim);
    Eigen::LLT<CMatrix> llt(e.w[b]);
    if (llt.info() != Eigen::Success) return false;
    double ld = 0.0;
    for (int i = 0; i < t.blocks[b].dim; ++i) {
      const double d = llt.matrixL()(i, i).real();
      if (!(d > 0.0)) return false;
      ld += std::log(d);
    }
    e.barrier -= 2.0 * ld;
    if (with_inverse) {
      e.s[b] = llt.solve(CMatrix::Identity(t.blocks[b].dim, t.blocks[b].dim));
      e.l[b] = llt.matrixL();
    }
  }
  if (!std::isfinite(e.barrier)) return false;
  e.ok = true;
  return true;
}

RVector barrier_gradient(const Prepped &t, const Eval &e) {
  RVector g = RVector::Zero(t.n);
  for (size_t i = 0; i < t.rows.size(); ++i) g += t.rows[i].a / e.slack[i];
  for (size_t i = 0; i < t.exps.size(); ++i) {
    const double u = e.uval[i], r = e.rval[i];
    const double fu = -(1.0 / r + 1.0) / u;
    const double fv = 1.0 / r;
    g += fu * t.exps[i].u + fv * t.exps[i].v;
  }
  for (size_t b = 0; b < t.blocks.size(); ++b) {
    RVector p = pack_hermitian(e.s[b]);
    g.segment(t.blocks[b].offset, p.size()) -= p;
  }
  return g;
}

// scaled rows whose Gram matrix is the affine + exponential Hessian part
RMatrix scaled_rows(const Prepped &t, const Eval &e) {
  const int k = static_cast<int>(t.rows.size() + 2 * t.exps.size());
  RMatrix rmat = RMatrix::Zero(k, t.n);
  int kk = 0;
  for (size_t i = 0; i < t.rows.size(); ++i) rmat.row(kk++) = t.rows[i].a / e.slack[i];
  for (size_t i = 0; i < t.exps.size(); ++i) {
    const double u = e.uval[i], r = e.rval[i];
    const double fuu = (1.0 / r + 1.0 / (r * r) + 1.0) / (u * u);
    const double fuv = -1.0 / (r * r * u);
    const double fvv = 1.0 / (r * r);
    const double l11 = std::sqrt(fuu);
    const double l21 = fuv / l11;
    const double l22 = std::sqrt(std::max(fvv - l21 * l21, 1e-30 * fvv));
    rmat.row(kk++) = l11 * t.exps[i].u + l21 * t.exps[i].v;
    rmat.row(kk++) = l22 * t.exps[i].v;
  }
  return rmat;
}

// congruence by the block matrices: out = blkdiag(W_b (.) W_b) applied to the
// block coordinates of y, zero on scalars -- the inverse of the log-det
// barrier Hessian
RVector apply_block_congruence(const Prepped &t, const std::vector<CMatrix> &mats,
                               const RVector &y) {
  RVector out = RVector::Zero(t.n);
  for (size_t b = 0; b < t.blocks.size(); ++b) {
    const int off = t.blocks[b].offset, d = t.blocks[b].dim;
    const CMatrix r = unpack_hermitian(y.data() + off, d);
    const CMatrix m = mats[b] * r * mats[b];
    pack_hermitian_into(m, out.data() + off);
  }
  return out;
}

// closed-form log-det Hessian of one block written into h
void fill_block_hessian(const std::vector<BasisElem> &basis, const CMatrix &s, int off,
                        RMatrix &h) {
  const int p = static_cast<int>(basis.size());
  for (int k = 0; k < p; ++k) {
    const auto &ek = basis[k];
    for (int l = k; l < p; ++l) {
      const auto &el = basis[l];
      const cplx t1 = ek.c * el.c * s(ek.b, el.a) * s(el.b, ek.a);
      const cplx t2 = ek.c * std::conj(el.c) * s(ek.b, el.b) * s(el.a, ek.a);
      const double val = 2.0 * (t1 + t2).real();
      h(off + k, off + l) += val;
      if (l != k) h(off + l, off + k) += val;
    }
  }
}

class NewtonSolver {
public:
  NewtonSolver(const Prepped &t, const BarrierSettings &st) : t_(t), st_(st) {}

  int fast_hits = 0, dense_hits = 0;
  bool budget_dense = false;  // set once the path has centered somewhere

  // solves (B + R'R) dx = rhs; returns false on numeric breakdown. Endgame
  // dense fallbacks are budgeted: once conditioning keeps defeating the fast
  // path, winding down via the stall logic beats grinding dense solves.
  bool solve(const Eval &e, const RMatrix &rmat, const RVector &rhs, RVector &dx) {
    if (st_.use_schur_fast_path && fast_solve(e, rmat, rhs, dx)) {
      ++fast_hits;
      return true;
    }
    if (st_.use_schur_fast_path && budget_dense && dense_hits >= 12) return false;
    ++dense_hits;
    return dense_solve(e, rmat, rhs, dx);
  }

private:
  RVector apply_hessian(const Eval &e, const RMatrix &rmat, const RVector &y) const {
    RVector out = apply_block_congruence(t_, e.s, y);  // uses W^-1 (.) W^-1
    out.noalias() += rmat.transpose() * (rmat * y);
    return out;
  }

  bool residual_ok(const Eval &e, const RMatrix &rmat, const RVector &rhs, RVector &dx,
                   bool allow_refine) const {
    const double rhs_norm = std::max(rhs.lpNorm<Eigen::Infinity>(), kTiny);
    double rel =
        (apply_hessian(e, rmat, dx) - rhs).lpNorm<Eigen::Infinity>() / rhs_norm;
    if (rel < 1e-7) return true;
    if (!allow_refine) return rel < 1e-4;
    for (int pass = 0; pass < 3 && rel >= 1e-7; ++pass) {
      RVector corr;
      if (!raw_solve(e, rmat, apply_hessian(e, rmat, dx) - rhs, corr)) break;
      const RVector trial = dx - corr;
      const double rel2 =
          (apply_hessian(e, rmat, trial) - rhs).lpNorm<Eigen::Infinity>() / rhs_norm;
      if (rel2 >= rel) break;  // refinement no longer contracting
      dx = trial;
      rel = rel2;
    }
    // inexact Newton directions are fine as long as they descend; the line
    // search and decrement tests govern actual progress
    return rel < 3e-2 && dx.dot(rhs) > 0.0;
  }

  // applies R -> L^H R L to every row's block segment, batched into two
  // GEMMs per block; in the isometric packing this is the Cholesky split of
  // the inverse block Hessian, so the Gram matrix of the result is exactly
  // R_M B^-1 R_M'. Input and output are column-per-row layouts (n x k).
  RMatrix half_congruence_cols(const Eval &e, const RMatrix &rt) const {
    const int k = static_cast<int>(rt.cols());
    RMatrix p = RMatrix::Zero(t_.n, k);
    CMatrix stack, a;
    for (size_t b = 0; b < t_.blocks.size(); ++b) {
      const int off = t_.blocks[b].offset, d = t_.blocks[b].dim;
      const CMatrix &lf = e.l[b];
      stack.resize(d, k * d);
      for (int i = 0; i < k; ++i)
        stack.middleCols(i * d, d) = unpack_hermitian(rt.col(i).data() + off, d);
      a.noalias() = lf.adjoint() * stack;  // L^H R_i tiles
      for (int i = 0; i < k; ++i)
        stack.middleCols(i * d, d) = a.middleCols(i * d, d).adjoint();
      a.noalias() = lf.adjoint() * stack;  // ((L^H R_i)^H L)^H tiles, adjoint below
      for (int i = 0; i < k; ++i) {
        const CMatrix tile = a.middleCols(i * d, d).adjoint();
        pack_hermitian_into(tile, p.col(i).data() + off);
      }
    }
    return p;
  }

  bool raw_solve(const Eval &e, const RMatrix &rmat, const RVector &rhs, RVector &dx) const {
    const int k = static_cast<int>(rmat.rows());
    const auto &scal = t_.scalar_idx;
    const int ns = static_cast<int>(scal.size());
    const RMatrix rt = rmat.transpose();
    const RMatrix p = half_congruence_cols(e, rt);  // n x k
    RMatrix c(k, k);
    c.setZero();
    c.selfadjointView<Eigen::Lower>().rankUpdate(p.transpose());
    c = c.selfadjointView<Eigen::Lower>();
    c.diagonal().array() += 1.0;
    Eigen::LLT<RMatrix> llt_c(c);
    if (llt_c.info() != Eigen::Success) return false;

    const RVector binv_rhs = apply_block_congruence(t_, e.w, rhs);
    const RVector q = rmat * binv_rhs;

    RVector dx_s;
    RMatrix rs(k, ns);
    if (ns > 0) {
      for (int j = 0; j < ns; ++j) rs.col(j) = rmat.col(scal[j]);
      const RMatrix z = llt_c.matrixL().solve(rs);
      const RVector zq = llt_c.matrixL().solve(q);
      RMatrix schur = z.transpose() * z;
      RVector rhs_s(ns);
      for (int j = 0; j < ns; ++j) rhs_s(j) = rhs(scal[j]);
      rhs_s -= z.transpose() * zq;
      Eigen::LDLT<RMatrix> ldlt_s(schur);
      if (ldlt_s.info() != Eigen::Success) return false;
      dx_s = ldlt_s.solve(rhs_s);
      if (!dx_s.allFinite()) return false;
    }

    RVector w_vec;
    if (ns > 0)
      w_vec = llt_c.solve(q + rs * dx_s);
    else
      w_vec = llt_c.solve(q);
    dx = apply_block_congruence(t_, e.w, rhs - rmat.transpose() * w_vec);
    for (int j = 0; j < ns; ++j) dx(scal[j]) = dx_s(j);
    return dx.allFinite();
  }

  bool fast_solve(const Eval &e, const RMatrix &rmat, const RVector &rhs, RVector &dx) {
    if (!raw_solve(e, rmat, rhs, dx)) return false;
    return residual_ok(e, rmat, rhs, dx, true);
  }

  bool dense_solve(const Eval &e, const RMatrix &rmat, const RVector &rhs, RVector &dx) const {
    RMatrix h = RMatrix::Zero(t_.n, t_.n);
    for (size_t b = 0; b < t_.blocks.size(); ++b)
      fill_block_hessian(t_.basis[b], e.s[b], t_.blocks[b].offset, h);
    h.noalias() += rmat.transpose() * rmat;
    RVector best;
    for (int attempt = 0; attempt < 3; ++attempt) {
      Eigen::LDLT<RMatrix> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        dx = ldlt.solve(rhs);
        if (dx.allFinite()) {
          if (residual_ok(e, rmat, rhs, dx, false)) return true;
          if (best.size() == 0 && dx.dot(rhs) > 0.0) best = dx;
        }
      }
      h.diagonal().array() += (attempt + 1) * 1e-11 * (1.0 + h.diagonal().maxCoeff());
    }
    // near the numerical floor an inexact descent direction still lets the
    // line search and the stall logic wind the phase down cleanly
    if (best.size() > 0) {
      dx = best;
      return true;
    }
    return false;
  }

  const Prepped &t_;
  const BarrierSettings &st_;
};

struct PathResult {
  bool ok = false;
  bool early = false;    // early-exit callback fired
  bool stalled = false;  // terminated by numerics before reaching the gap target
  double achieved_gap = std::numeric_limits<double>::infinity();
  RVector x;
  RVector interior_hint;  // centered midpath iterate (moderate gap)
  double hint_t = 0.0;
  int steps = 0;
  std::string message;
};

// Path-following minimization of cost' x + (1/t) barrier, t increasing.
// early_exit is polled after every accepted step (deep escape hatch);
// stage_exit at every completed centering, where the iterate is well
// centered and safe to hand off.
template <typename EarlyExit, typename StageExit>
PathResult follow_path(const Prepped &t, const RVector &x0, double gap_target,
                       const BarrierSettings &st, EarlyExit early_exit, StageExit stage_exit) {
  PathResult out;
  out.x = x0;
  Eval e;
  if (!eval_point(t, out.x, true, e)) {
    out.message = "start point not strictly feasible";
    return out;
  }
  NewtonSolver ns(t, st);
  double tpath = st.t_init;
  const int max_stages = 80;
  double t_centered = 0.0;  // largest t at which centering completed
  auto stall = [&](const char *why) {
    out.message = why;
    // the last centered point certifies roughly nu/t; factor 2 covers the
    // off-path remainder
    if (t_centered > 0.0) {
      out.stalled = true;
      out.achieved_gap = 2.0 * t.nu / t_centered;
    }
    return out;
  };
  for (int stage = 0; stage < max_stages; ++stage) {
    const bool final_stage = t.nu / tpath <= gap_target;
    const double ctol = final_stage ? 1e-4 : st.center_tol;
    bool centered = false;
    for (int inner = 0; inner < st.max_inner; ++inner) {
      const RVector g = tpath * t.cost + barrier_gradient(t, e);
      const RMatrix rmat = scaled_rows(t, e);
      RVector dx;
      if (!ns.solve(e, rmat, -g, dx)) return stall("newton system breakdown");
      const double dec2 = std::max(0.0, dx.dot(-g));
      if (std::getenv("SECNOMA_BARRIER_DEBUG"))
        fprintf(stderr, "stage=%d inner=%d t=%.3e dec2=%.3e obj=%.12e\n", stage, inner, tpath,
                dec2, t.cost.dot(out.x));
      if (dec2 <= ctol) {
        t_centered = tpath;
        ns.budget_dense = true;
        centered = true;
        if (out.interior_hint.size() == 0 &&
            t.nu / tpath <= 0.1 * (1.0 + std::abs(t.cost.dot(out.x)))) {
          out.interior_hint = out.x;
          out.hint_t = tpath;
        }
        break;
      }
      // backtracking line search on the merit t*cost + barrier
      const double merit0 = tpath * t.cost.dot(out.x) + e.barrier;
      double alpha = 1.0;
      bool stepped = false;
      Eval etrial;
      for (int ls = 0; ls < 60; ++ls) {
        const RVector xt = out.x + alpha * dx;
        if (eval_point(t, xt, false, etrial)) {
          const double merit = tpath * t.cost.dot(xt) + etrial.barrier;
          if (merit <= merit0 - 1e-4 * alpha * dec2) {
            out.x = xt;
            stepped = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!stepped) return stall("line search stalled");
      ++out.steps;
      if (!eval_point(t, out.x, true, e)) {
        out.message = "post-step evaluation failed";
        return out;
      }
      if (early_exit(out.x)) {
        out.ok = out.early = true;
        return out;
      }
      if (out.steps > st.max_newton) return stall("newton budget exhausted");
    }
    if (!centered) return stall("centering did not converge");
    if (stage_exit(out.x)) {
      out.ok = out.early = true;
      break;
    }
    if (final_stage) {
      out.ok = true;
      out.achieved_gap = t.nu / tpath;
      break;
    }
    tpath *= st.t_mult;
  }
  if (!out.ok) return stall("stage budget exhausted");
  if (std::getenv("SECNOMA_BARRIER_DEBUG"))
    fprintf(stderr, "path done: steps=%d fast=%d dense=%d\n", out.steps, ns.fast_hits,
            ns.dense_hits);
  return out;
}

// Phase-I program: minimize a uniform slack s over the relaxed constraints.
// Matrix blocks are handled by the substitution W' = W + s I so the block
// structure (and the fast Newton path) is preserved.
struct Phase1 {
  ConicProgram prog;
  int s_index;
};

double diag_coeff_sum(const RVector &a, const std::vector<MatrixBlock> &blocks) {
  double ds = 0.0;
  for (const auto &b : blocks)
    for (int j = 0; j < b.dim; ++j) ds += a(b.offset + (j + 1) * (j + 1) - 1);
  return ds;
}

// The phase-I objective leaves most coordinates costless, so the artificial
// domain must be compact or the barrier merit is unbounded below: blocks get
// trace caps and loose coordinates get boxes, all sized from the start point
// and dropped again in phase II. A small multiple of the true cost keeps the
// slack minimization from wandering to expensive corners of that domain.
Phase1 build_phase1(const ConicProgram &p, const RVector &x0, double s0, double cost_weight) {
  const int n = p.nvars();
  Phase1 ph{ConicProgram(n + 1), n};
  ph.prog.cost()(n) = 1.0;
  ph.prog.cost().head(n) = cost_weight * p.cost();
  for (const auto &b : p.blocks()) ph.prog.add_block(b.offset, b.dim, b.tag);
  for (const auto &r : p.affine()) {
    RVector a(n + 1);
    a.head(n) = r.a;
    a(n) = -diag_coeff_sum(r.a, p.blocks()) - 1.0;
    ph.prog.add_affine(std::move(a), r.rhs, r.tag);
  }
  for (const auto &e : p.exp_rows()) {
    RVector u(n + 1), v(n + 1);
    u.head(n) = e.u;
    u(n) = -diag_coeff_sum(e.u, p.blocks()) + 1.0;
    v.head(n) = e.v;
    v(n) = -diag_coeff_sum(e.v, p.blocks());
    ph.prog.add_exp(std::move(u), e.u0, std::move(v), e.v0, e.tag);
  }
  std::vector<bool> in_block(n, false);
  for (const auto &b : p.blocks()) {
    double tr0 = std::abs(s0) * b.dim;
    for (int j = 0; j < b.dim; ++j) {
      const int idx = b.offset + (j + 1) * (j + 1) - 1;
      tr0 += std::abs(x0(idx));
    }
    for (int i = 0; i < b.dim * b.dim; ++i) in_block[b.offset + i] = true;
    RVector a = RVector::Zero(n + 1);
    for (int j = 0; j < b.dim; ++j) a(b.offset + (j + 1) * (j + 1) - 1) = 1.0;
    a(n) = b.dim;  // cap applies to the shifted block W + sI
    ph.prog.add_affine(std::move(a), 1e4 * (1.0 + tr0), "phase1-trace-cap " + b.tag);
  }
  for (int i = 0; i < n; ++i) {
    if (in_block[i]) continue;
    const double m = 1e5 * (1.0 + std::abs(x0(i)));
    RVector lo = RVector::Zero(n + 1), hi = RVector::Zero(n + 1);
    hi(i) = 1.0;
    lo(i) = -1.0;
    ph.prog.add_affine(std::move(hi), m, "phase1-box-hi");
    ph.prog.add_affine(std::move(lo), m, "phase1-box-lo");
  }
  {
    RVector lo = RVector::Zero(n + 1), hi = RVector::Zero(n + 1);
    hi(n) = 1.0;
    lo(n) = -1.0;
    const double m = 10.0 * (1.0 + std::abs(s0));
    ph.prog.add_affine(std::move(hi), m, "phase1-box-hi");
    ph.prog.add_affine(std::move(lo), m, "phase1-box-lo");
  }
  return ph;
}

// phase-I coordinates for a given original point and uniform slack
RVector to_phase1_coords(const ConicProgram &p, const RVector &x, double s) {
  RVector z(p.nvars() + 1);
  z.head(p.nvars()) = x;
  z(p.nvars()) = s;
  for (const auto &b : p.blocks())
    for (int j = 0; j < b.dim; ++j) z(b.offset + (j + 1) * (j + 1) - 1) += s;
  return z;
}

RVector from_phase1_coords(const ConicProgram &p, const RVector &z) {
  RVector x = z.head(p.nvars());
  const double s = z(p.nvars());
  for (const auto &b : p.blocks())
    for (int j = 0; j < b.dim; ++j) x(b.offset + (j + 1) * (j + 1) - 1) -= s;
  return x;
}

}  // namespace

ConeSolution BarrierSolver::solve(const ConicProgram &raw_prog, const RVector *start,
                                  const BarrierSettings &settings) const {
  ConeSolution sol;
  Normalized norm = normalize_program(raw_prog);
  if (norm.trivially_infeasible) {
    sol.status = SolveStatus::infeasible;
    sol.message = norm.message;
    sol.infeasibility = std::numeric_limits<double>::infinity();
    return sol;
  }
  const ConicProgram &prog = norm.prog;
  Prepped prepped = prepare(prog);

  RVector x0;
  if (start && start->size() == prog.nvars()) {
    x0 = *start;
  } else {
    x0 = RVector::Zero(prog.nvars());
    for (const auto &b : prog.blocks())
      for (int j = 0; j < b.dim; ++j) x0(b.offset + (j + 1) * (j + 1) - 1) = 1.0;
  }
  if (!x0.allFinite()) {
    sol.message = "start point not finite";
    return sol;
  }

  // ---- phase I: find a strictly feasible point -----------------------------
  const double viol0 = prepped.rows.empty() && prepped.exps.empty() && prepped.blocks.empty()
                           ? 0.0
                           : prog.max_violation(x0);
  if (!std::isfinite(viol0)) {
    sol.message = "start point violation not finite";
    return sol;
  }
  // strictly interior warm starts can skip phase I outright, resuming the
  // path near where the previous solve recorded the hint
  if (viol0 < -1e-9) {
    BarrierSettings st_direct = settings;
    st_direct.t_init =
        settings.warm_t > 0.0
            ? settings.warm_t
            : std::max(settings.t_init, prepped.nu / (1.0 + std::abs(prog.cost().dot(x0))));
    PathResult direct = follow_path(prepped, x0, settings.gap_abs, st_direct,
                                    [](const RVector &) { return false; },
                                    [](const RVector &) { return false; });
    sol.newton_steps += direct.steps;
    if (direct.ok || (direct.stalled && direct.achieved_gap <= settings.gap_accept)) {
      sol.status = SolveStatus::optimal;
      sol.x = direct.x;
      sol.objective = prog.cost().dot(direct.x);
      sol.gap_bound = direct.achieved_gap;
      sol.interior_hint = direct.interior_hint.size() ? direct.interior_hint : x0;
      sol.interior_hint_t = direct.interior_hint.size() ? direct.hint_t : st_direct.t_init;
      if (!direct.ok) sol.message = "stalled within acceptance bound: " + direct.message;
      return sol;
    }
    // fall through to phase I
  }

  const double s0 = 1.05 * std::max(viol0, 0.0) + std::max(1e-3, 0.05 * std::abs(viol0)) + 1e-6;
  const double done = settings.phase1_done;
  const double base_weight = 0.01 / (1.0 + std::abs(prog.cost().dot(x0)));
  BarrierSettings st1 = settings;
  st1.center_tol = 1.0;   // sloppy centering is fine until the handoff stage
  st1.t_mult = 25.0;
  RVector x_feas;
  bool found = false;
  for (int round = 0; round < 2 && !found; ++round) {
    // a cost-blind retry guards against the regularizer masking feasibility
    Phase1 ph = build_phase1(prog, x0, s0, round == 0 ? base_weight : base_weight * 1e-4);
    Prepped p1 = prepare(ph.prog);
    const RVector z0 = to_phase1_coords(prog, x0, s0);
    const int s_idx = ph.s_index;
    st1.t_init = std::max(settings.t_init, p1.nu / (1.0 + std::abs(p1.cost.dot(z0))));
    // hand off at a centered point with a comfortable uniform margin;
    // mid-stage exit only once clearly deep inside
    PathResult r1 = follow_path(p1, z0, /*gap*/ 1e-8, st1,
                                [&](const RVector &z) { return z(s_idx) < -1e-2; },
                                [&](const RVector &z) { return z(s_idx) < -done; });
    sol.newton_steps += r1.steps;
    if (std::getenv("SECNOMA_BARRIER_DEBUG"))
      fprintf(stderr, "phase1 round=%d ok=%d early=%d stalled=%d s=%.6e steps=%d msg=%s\n", round,
              r1.ok, r1.early, r1.stalled, r1.x.size() ? r1.x(s_idx) : 1e99, r1.steps,
              r1.message.c_str());
    if (r1.early || (r1.ok && r1.x(s_idx) < -done)) {
      // thin-margin completions still count: the interior exists, just barely
      x_feas = from_phase1_coords(prog, r1.x);
      found = true;
    } else if (r1.ok) {
      sol.status = SolveStatus::infeasible;
      sol.infeasibility = r1.x(s_idx);
      sol.message = "phase-I optimum above feasibility threshold";
      if (round > 0) return sol;
    } else {
      sol.status = SolveStatus::numeric_failure;
      sol.message = "phase-I failed: " + r1.message;
      if (round > 0) return sol;
    }
  }
  if (!found) return sol;
  sol.status = SolveStatus::numeric_failure;
  sol.message.clear();

  // ---- phase II: follow the central path on the true objective -------------
  Prepped &p2 = prepped;
  BarrierSettings st2 = settings;
  st2.t_init = std::max(settings.t_init, prepped.nu / (1.0 + std::abs(prog.cost().dot(x_feas))));
  PathResult r2 =
      follow_path(p2, x_feas, settings.gap_abs, st2, [](const RVector &) { return false; },
                  [](const RVector &) { return false; });
  sol.newton_steps += r2.steps;
  if (!r2.ok && !(r2.stalled && r2.achieved_gap <= settings.gap_accept)) {
    sol.message = "phase-II failed: " + r2.message;
    return sol;
  }
  sol.status = SolveStatus::optimal;
  sol.x = r2.x;
  sol.objective = prog.cost().dot(r2.x);
  sol.gap_bound = r2.achieved_gap;
  sol.interior_hint = r2.interior_hint.size() ? r2.interior_hint : x_feas;
  sol.interior_hint_t = r2.interior_hint.size() ? r2.hint_t : st2.t_init;
  if (!r2.ok) sol.message = "stalled within acceptance bound: " + r2.message;
  return sol;
}

std::unique_ptr<ConeSolver> make_cone_solver(const std::string &key) {
  if (key == "barrier" || key.empty()) return std::make_unique<BarrierSolver>();
  throw validation_error("unknown solver backend: " + key);
}

}  // namespace secnoma
