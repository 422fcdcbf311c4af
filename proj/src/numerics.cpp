// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyntp/error.hpp"
#include "hyntp/tolerances.hpp"

namespace hyntp::numerics {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (!a.square()) {
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
}

double norm_one(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Cyclic Jacobi on a symmetric copy; optionally accumulates eigenvectors.
void jacobi(Matrix& a, Matrix* v) {
  const std::size_t n = a.rows();
  const double total = norm_fro(a);
  if (total == 0.0) return;
  for (int sweep = 0; sweep < kTol.jacobi_max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= kTol.jacobi_offdiag * total) return;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        if (v != nullptr) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*v)(k, p), vkq = (*v)(k, q);
            (*v)(k, p) = c * vkp - s * vkq;
            (*v)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
}

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0.0) alpha = -alpha;
    Vector u(n, 0.0);
    u[k + 1] = a(k + 1, k) - alpha;
    for (std::size_t i = k + 2; i < n; ++i) u[i] = a(i, k);
    const double uu = vec::dot(u, u);
    if (uu == 0.0) continue;
    // A <- (I - 2uu^T/uu) A (I - 2uu^T/uu)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += u[i] * a(i, j);
      s *= 2.0 / uu;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * u[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * u[j];
      s *= 2.0 / uu;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * u[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr layout,
// 1-based indices internally).
std::vector<std::complex<double>> hessenberg_qr(const Matrix& h) {
  const int n = static_cast<int>(h.rows());
  std::vector<double> store((n + 1) * (n + 1), 0.0);
  auto a = [&](int i, int j) -> double& { return store[i * (n + 1) + j]; };
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) a(i, j) = h(i - 1, j - 1);
  std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

  int nn = n;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 1) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (its == kTol.qr_max_iterations) {
            throw ContractError("spectrum: QR iteration did not converge");
          }
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<std::complex<double>> out;
  out.reserve(n);
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

// LU factorization with partial pivoting; returns the permutation.
std::vector<std::size_t> lu_factor(Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= 1e-14 * scale) throw ContractError("solve: matrix is singular");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      a(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return perm;
}

}  // namespace

Matrix mat_exp(const Matrix& a) {
  require_square(a, "mat_exp");
  const std::size_t n = a.rows();
  static constexpr double c[] = {1.0,          0.5,           5.0 / 44.0,        1.0 / 66.0,
                                 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
  const double norm = norm_one(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = a * std::ldexp(1.0, -squarings);

  const Matrix id = Matrix::identity(n);
  Matrix num = id * c[0];
  Matrix den = id * c[0];
  Matrix power = id;
  for (int k = 1; k <= 6; ++k) {
    power = power * x;
    num += power * c[k];
    den += power * ((k % 2 == 0) ? c[k] : -c[k]);
  }
  Matrix e = solve(den, num);
  for (int k = 0; k < squarings; ++k) e = e * e;
  return e;
}

EigExtrema sym_eig_extrema(const Matrix& s) {
  const Vector ev = sym_eigenvalues(s);
  return {ev.front(), ev.back()};
}

Vector sym_eigenvalues(const Matrix& s) {
  require_square(s, "sym_eigenvalues");
  require_symmetric(s, "sym_eigenvalues");
  if (s.rows() == 0) throw DimensionError("sym_eigenvalues: empty matrix");
  Matrix a = sym_part(s);
  jacobi(a, nullptr);
  Vector ev(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

SymEigen sym_eigen(const Matrix& s) {
  require_square(s, "sym_eigen");
  require_symmetric(s, "sym_eigen");
  const std::size_t n = s.rows();
  Matrix a = sym_part(s);
  Matrix v = Matrix::identity(n);
  jacobi(a, &v);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::vector<std::complex<double>> spectrum(const Matrix& a) {
  require_square(a, "spectrum");
  if (a.rows() == 0) return {};
  Matrix h = a;
  hessenberg(h);
  auto ev = hessenberg_qr(h);
  std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return ev;
}

bool is_positive_definite(const Matrix& s) {
  require_square(s, "is_positive_definite");
  require_symmetric(s, "is_positive_definite");
  const std::size_t n = s.rows();
  Matrix l(n, n);
  const Matrix a = sym_part(s);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > kTol.pd_pivot)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return true;
}

Matrix sym_part(const Matrix& a) {
  require_square(a, "sym_part");
  Matrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

bool is_symmetric(const Matrix& a) {
  if (!a.square()) return false;
  const double scale = std::max(1.0, max_abs(a));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > kTol.symmetry * scale) return false;
  return true;
}

void require_symmetric(const Matrix& a, const char* what) {
  if (!is_symmetric(a)) throw ContractError(std::string(what) + ": matrix is not symmetric");
}

Matrix solve(const Matrix& a, const Matrix& b) {
  require_square(a, "solve");
  if (b.rows() != a.rows()) throw DimensionError("solve: right-hand side rows mismatch");
  Matrix lu = a;
  const auto perm = lu_factor(lu);
  const std::size_t n = a.rows();
  Matrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b(perm[i], c);
      for (std::size_t k = 0; k < i; ++k) s -= lu(i, k) * y[k];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= lu(ii, k) * x(k, c);
      x(ii, c) = s / lu(ii, ii);
    }
  }
  return x;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

double spectral_norm(const Matrix& a) {
  const Matrix g = sym_part(a.transpose() * a);
  return std::sqrt(std::max(0.0, sym_eig_extrema(g).lambda_max));
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  require_square(a, "solve_lyapunov");
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw DimensionError("solve_lyapunov: Q shape mismatch");
  }
  const std::size_t n = a.rows();
  Matrix k(n * n, n * n);
  Matrix rhs(n * n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t m = 0; m < n; ++m) {
        k(row, m * n + j) += a(m, i);
        k(row, i * n + m) += a(m, j);
      }
      rhs(row, 0) = -q(i, j);
    }
  }
  const Matrix x = solve(k, rhs);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = x(i * n + j, 0);
  return sym_part(out);
}

}  // namespace hyntp::numerics
