// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <sstream>
#include <string>

#include "hyntp/error.hpp"
#include "hyntp/numerics.hpp"
#include "hyntp/tolerances.hpp"

namespace hyntp::graph {

namespace {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

std::vector<bool> reachable(const Digraph& g, bool reverse) {
  const std::size_t n = g.size();
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < n; ++k) {
      const bool edge = reverse ? g.has_edge(k, i) : g.has_edge(i, k);
      if (edge && !seen[k]) {
        seen[k] = true;
        queue.push_back(k);
      }
    }
  }
  return seen;
}

// Basis of the null space of the n x n matrix m (row-major) by Gauss-Jordan
// elimination with full pivoting.
std::vector<CVector> null_space(std::vector<cplx> m, std::size_t n, double tol) {
  std::vector<std::size_t> pivot_col;
  std::vector<bool> is_pivot(n, false);
  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return m[i * n + j]; };
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t bi = r, bj = n;
    double best = tol;
    for (std::size_t i = r; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!is_pivot[j] && std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          bi = i;
          bj = j;
        }
    if (bj == n) break;
    for (std::size_t j = 0; j < n; ++j) std::swap(at(r, j), at(bi, j));
    const cplx piv = at(r, bj);
    for (std::size_t j = 0; j < n; ++j) at(r, j) /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r) continue;
      const cplx f = at(i, bj);
      if (f == cplx(0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) at(i, j) -= f * at(r, j);
    }
    pivot_col.push_back(bj);
    is_pivot[bj] = true;
  }
  std::vector<CVector> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    CVector v(n, cplx(0.0));
    v[f] = 1.0;
    for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -at(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

cplx inner(const CVector& a, const CVector& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Orthonormalizes in place, then fixes the phase so that the first entry of
// non-negligible magnitude is real and positive.
void orthonormalize(std::vector<CVector>& basis) {
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (std::size_t p = 0; p < k; ++p) {
      const cplx c = inner(basis[p], basis[k]);
      for (std::size_t i = 0; i < basis[k].size(); ++i) basis[k][i] -= c * basis[p][i];
    }
    const double nrm = std::sqrt(std::abs(inner(basis[k], basis[k])));
    for (cplx& v : basis[k]) v /= nrm;
    for (const cplx& v : basis[k]) {
      if (std::abs(v) > 1e-10) {
        const cplx phase = std::conj(v) / std::abs(v);
        for (cplx& w : basis[k]) w *= phase;
        break;
      }
    }
  }
}

std::string describe(const std::vector<cplx>& values) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ", ";
    os << values[i].real();
    if (values[i].imag() != 0.0) os << (values[i].imag() > 0 ? "+" : "") << values[i].imag() << "i";
  }
  return os.str();
}

}  // namespace

Digraph Digraph::from_adjacency(const Matrix& adjacency) {
  if (!adjacency.square()) throw DimensionError("adjacency matrix must be square");
  const std::size_t n = adjacency.rows();
  if (n < 2) throw ContractError("digraph needs at least 2 nodes");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double v = adjacency(i, k);
      if (v != 0.0 && v != 1.0) throw ContractError("adjacency entries must be 0 or 1");
      if (i == k && v != 0.0) throw ContractError("adjacency diagonal must be zero");
    }
  }
  return Digraph(n, adjacency);
}

Digraph Digraph::from_edges(std::size_t n,
                            const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Matrix a(n, n);
  for (const auto& [i, k] : edges) {
    if (i >= n || k >= n) throw ContractError("edge index out of range");
    a(i, k) = 1.0;
  }
  return from_adjacency(a);
}

std::vector<std::size_t> Digraph::neighbours(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n_; ++k)
    if (has_edge(i, k)) out.push_back(k);
  return out;
}

std::size_t Digraph::in_degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t k = 0; k < n_; ++k) d += has_edge(i, k) ? 1 : 0;
  return d;
}

std::size_t Digraph::out_degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t k = 0; k < n_; ++k) d += has_edge(k, i) ? 1 : 0;
  return d;
}

Matrix laplacian(const Digraph& g) {
  Matrix l = -g.adjacency();
  for (std::size_t i = 0; i < g.size(); ++i) l(i, i) = static_cast<double>(g.in_degree(i));
  return l;
}

bool is_strongly_connected(const Digraph& g) {
  const auto fwd = reachable(g, false);
  const auto bwd = reachable(g, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

Classification classify(const Digraph& g) {
  Classification c{true, true, 0, g.size()};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t din = g.in_degree(i);
    if (din != g.out_degree(i)) c.balanced = false;
    if (din != g.size() - 1) c.complete = false;
    c.max_in_degree = std::max(c.max_in_degree, din);
    c.min_in_degree = std::min(c.min_in_degree, din);
  }
  return c;
}

DisagreementTransform disagreement_transform(const Digraph& g) {
  if (!is_strongly_connected(g)) {
    throw PreconditionError("disagreement_transform: digraph is not strongly connected");
  }
  const std::size_t n = g.size();
  const Matrix l = laplacian(g);
  const double scale = std::max(1.0, max_abs(l));
  auto ev = numerics::spectrum(l);

  std::size_t zero_idx = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(ev[i]) < std::abs(ev[zero_idx])) zero_idx = i;
  if (std::abs(ev[zero_idx]) > 1e-8 * scale) {
    throw UnsupportedSpectrum("Laplacian has no zero eigenvalue: " + describe(ev));
  }
  ev.erase(ev.begin() + static_cast<std::ptrdiff_t>(zero_idx));

  // Group numerically coincident eigenvalues.
  std::vector<std::vector<cplx>> clusters;
  std::vector<bool> used(ev.size(), false);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (used[i]) continue;
    std::vector<cplx> cl{ev[i]};
    used[i] = true;
    for (std::size_t k = i + 1; k < ev.size(); ++k) {
      if (!used[k] && std::abs(ev[k] - ev[i]) <= kTol.eig_cluster * std::max(1.0, std::abs(ev[i]))) {
        cl.push_back(ev[k]);
        used[k] = true;
      }
    }
    clusters.push_back(std::move(cl));
  }

  Matrix t(n, n);
  Matrix lbar(n - 1, n - 1);
  for (std::size_t i = 0; i < n; ++i) t(i, 0) = 1.0 / std::sqrt(static_cast<double>(n));
  bool real_spectrum = true;
  std::size_t col = 1;

  for (const auto& cl : clusters) {
    cplx centre = 0.0;
    for (const cplx& v : cl) centre += v;
    centre /= static_cast<double>(cl.size());
    const double tol_im = kTol.eig_cluster * std::max(1.0, std::abs(centre));
    const bool is_real = std::abs(centre.imag()) <= tol_im;
    if (!is_real && centre.imag() > 0.0) continue;  // handled with its conjugate
    const cplx lambda = is_real ? cplx(centre.real(), 0.0) : std::conj(centre);

    std::vector<cplx> shifted(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) shifted[i * n + k] = l(i, k) - (i == k ? lambda : 0.0);
    auto basis = null_space(std::move(shifted), n, kTol.null_space * scale);
    if (basis.size() != cl.size()) {
      throw UnsupportedSpectrum("Laplacian is not diagonalizable at eigenvalue(s) " + describe(cl));
    }
    orthonormalize(basis);

    if (is_real) {
      for (const CVector& v : basis) {
        for (std::size_t i = 0; i < n; ++i) t(i, col) = v[i].real();
        lbar(col - 1, col - 1) = lambda.real();
        ++col;
      }
    } else {
      real_spectrum = false;
      for (const CVector& v : basis) {
        // L [x y] = [x y] [[alpha, beta], [-beta, alpha]] for v = x + i y.
        for (std::size_t i = 0; i < n; ++i) {
          t(i, col) = v[i].real();
          t(i, col + 1) = v[i].imag();
        }
        lbar(col - 1, col - 1) = lambda.real();
        lbar(col - 1, col) = lambda.imag();
        lbar(col, col - 1) = -lambda.imag();
        lbar(col, col) = lambda.real();
        col += 2;
      }
    }
  }
  if (col != n) throw UnsupportedSpectrum("Laplacian eigenvectors incomplete: " + describe(ev));

  Matrix t_inv;
  try {
    t_inv = numerics::inverse(t);
  } catch (const ContractError&) {
    throw UnsupportedSpectrum("Laplacian eigenvector matrix is singular: " + describe(ev));
  }
  if (max_abs(t * t_inv - Matrix::identity(n)) > kTol.transform_inverse) {
    throw UnsupportedSpectrum("Laplacian eigenvector matrix is ill-conditioned: " + describe(ev));
  }
  const Matrix tlt = t_inv * l * t;
  double border = 0.0;
  for (std::size_t i = 0; i < n; ++i) border = std::max({border, std::abs(tlt(0, i)), std::abs(tlt(i, 0))});
  const double block_gap = max_abs(tlt.block(1, 1, n - 1, n - 1) - lbar);
  if (border > kTol.transform_block || block_gap > kTol.transform_block) {
    throw UnsupportedSpectrum("Laplacian block form not reached: " + describe(ev));
  }
  return {t, t_inv, lbar, real_spectrum};
}

Matrix gamma_matrix(const DisagreementTransform& tr) {
  const std::size_t n = tr.T.rows();
  Matrix g(4 * n + 1, 4 * n + 1);
  for (std::size_t b = 0; b < 4; ++b) g.set_block(b * n, b * n, tr.T);
  g(4 * n, 4 * n) = 1.0;
  return g;
}

}  // namespace hyntp::graph
