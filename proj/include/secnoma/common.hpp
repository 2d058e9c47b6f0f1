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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace secnoma {

inline constexpr const char *kVersion = "0.1.0";

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// ---- units ---------------------------------------------------------------

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double mw_to_watts(double mw) { return 1e-3 * mw; }
inline double watts_to_mw(double w) { return 1e3 * w; }

// ---- deterministic rng ----------------------------------------------------
//
// All randomness flows through this wrapper: raw 64-bit draws come from
// std::mt19937_64 (whose sequence is fixed by the standard) and every
// distribution is derived with explicit arithmetic, so results are
// reproducible bit-for-bit for a given seed.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller (explicit, implementation independent)
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // circularly-symmetric complex Gaussian with E|z|^2 = variance
  cplx cgauss(double variance) {
    const double s = std::sqrt(variance / 2.0);
    return {s * gauss(), s * gauss()};
  }

  CVector cgauss_vector(int n, double variance) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cgauss(variance);
    return v;
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// ---- small hermitian helpers ----------------------------------------------

// Real isometric packing of a Hermitian n x n matrix into n^2 reals:
// columns j = 0..n-1, rows i = 0..j; off-diagonal entries contribute
// sqrt(2)*Re and sqrt(2)*Im so that dot(pack(A), pack(B)) == Tr(A*B).
inline int hermitian_pack_size(int n) { return n * n; }

inline void pack_hermitian_into(const CMatrix &m, double *out) {
  const int n = static_cast<int>(m.rows());
  const double rt2 = std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      out[k++] = rt2 * m(i, j).real();
      out[k++] = rt2 * m(i, j).imag();
    }
    out[k++] = m(j, j).real();
  }
}

inline RVector pack_hermitian(const CMatrix &m) {
  RVector v(hermitian_pack_size(static_cast<int>(m.rows())));
  pack_hermitian_into(m, v.data());
  return v;
}

inline CMatrix unpack_hermitian(const double *v, int n) {
  CMatrix m(n, n);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double re = v[k++] * inv_rt2;
      const double im = v[k++] * inv_rt2;
      m(i, j) = cplx(re, im);
      m(j, i) = cplx(re, -im);
    }
    m(j, j) = cplx(v[k++], 0.0);
  }
  return m;
}

inline CMatrix unpack_hermitian(const RVector &v, int n) { return unpack_hermitian(v.data(), n); }

// real quadratic form h' M h for Hermitian M
inline double quad_form(const CMatrix &m, const CVector &h) {
  return (h.adjoint() * m * h)(0, 0).real();
}

// eigenvalues sorted descending
inline RVector hermitian_eigenvalues(const CMatrix &m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

// shortest round-trip decimal rendering (stable across runs)
std::string format_double(double v);

// ---- errors ----------------------------------------------------------------

struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct numeric_domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct infeasible_requirement_error : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace secnoma
