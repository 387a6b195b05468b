#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gpcurve/errors.hpp"
#include "gpcurve/util.hpp"

namespace gpcurve {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Symmetric tridiagonal matrix stored as diagonal + off-diagonal.
struct SymTridiag {
    Vec diag;
    Vec off;  // size n-1
};

// Number of eigenvalues of T strictly below sigma (Sturm sequence with the
// usual underflow guard).
inline int sturm_count(const SymTridiag& T, double sigma) {
    const std::size_t n = T.diag.size();
    int count = 0;
    double d = T.diag[0] - sigma;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        if (d == 0.0) d = 1e-300;
        d = (T.diag[i] - sigma) - T.off[i - 1] * T.off[i - 1] / d;
        if (d < 0.0) ++count;
    }
    return count;
}

// k lowest eigenvalues of a symmetric tridiagonal matrix by bisection,
// ascending order.
inline Vec lowest_eigenvalues(const SymTridiag& T, int k) {
    const std::size_t n = T.diag.size();
    double lo = T.diag[0], hi = T.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(T.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(T.off[i]) : 0.0);
        lo = std::min(lo, T.diag[i] - r);
        hi = std::max(hi, T.diag[i] + r);
    }
    Vec out;
    out.reserve(k);
    for (int j = 1; j <= k; ++j) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
            const double m = 0.5 * (a + b);
            (sturm_count(T, m) >= j ? b : a) = m;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

// Pivoted LU of a general tridiagonal matrix (the dgttrf/dgtts2 scheme):
// partial pivoting keeps the factorization stable for indefinite operators.
struct TridiagLU {
    Vec dl, d, du, du2;
    std::vector<int> piv;
    std::size_t n = 0;

    static TridiagLU factor(Vec lower, Vec diag, Vec upper) {
        TridiagLU f;
        f.n = diag.size();
        f.dl = std::move(lower);
        f.d = std::move(diag);
        f.du = std::move(upper);
        f.du2.assign(f.n >= 2 ? f.n - 2 : 0, 0.0);
        f.piv.resize(f.n);
        for (std::size_t i = 0; i < f.n; ++i) f.piv[i] = int(i);
        for (std::size_t i = 0; i + 1 < f.n; ++i) {
            const bool last = (i + 2 == f.n);
            if (std::abs(f.d[i]) >= std::abs(f.dl[i])) {
                if (f.d[i] != 0.0) {
                    const double fact = f.dl[i] / f.d[i];
                    f.dl[i] = fact;
                    f.d[i + 1] -= fact * f.du[i];
                }
                if (!last) f.du2[i] = 0.0;
            } else {
                const double fact = f.d[i] / f.dl[i];
                f.d[i] = f.dl[i];
                f.dl[i] = fact;
                const double temp = f.du[i];
                f.du[i] = f.d[i + 1];
                f.d[i + 1] = temp - fact * f.d[i + 1];
                if (!last) {
                    f.du2[i] = f.du[i + 1];
                    f.du[i + 1] = -fact * f.du[i + 1];
                }
                f.piv[i] = int(i + 1);
            }
        }
        return f;
    }

    void solve(Vec& b) const {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (piv[i] == int(i)) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double temp = b[i] - dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            }
        }
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t i = n - 2; i-- > 0;)
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
};

inline TridiagLU factor_sym(const SymTridiag& T, double shift = 0.0) {
    Vec diag = T.diag;
    for (auto& v : diag) v -= shift;
    return TridiagLU::factor(T.off, diag, T.off);
}

// Eigenvector of a symmetric tridiagonal matrix by shifted inverse iteration.
inline Vec inverse_iteration(const SymTridiag& T, double lam, int iters = 30) {
    const std::size_t n = T.diag.size();
    const TridiagLU lu = factor_sym(T, lam + 1e-10);
    Vec v(n, 1.0 / std::sqrt(double(n)));
    for (int it = 0; it < iters; ++it) {
        lu.solve(v);
        double nrm = 0.0;
        for (double t : v) nrm += t * t;
        nrm = std::sqrt(nrm);
        for (double& t : v) t /= nrm;
    }
    return v;
}

// Solve the bordered system
//   L phi + sum_i mu_i chi_i = rhs,   <phi, chi_i>_w = 0,
// with L tridiagonal (interior operator, Dirichlet ends) and the chi_i given
// on the same grid. Returns phi in place and the multipliers. Used for every
// projected line solve, where L alone is singular or nearly so.
struct BorderedResult {
    Vec phi;
    Vec mu;
};

// Block elimination: x = T^{-1}(b - C mu), with mu from the small Schur
// complement. T may be nearly singular along one mode; iterative refinement
// against the full bordered matrix restores the lost digits.
inline BorderedResult solve_bordered_tridiag(const SymTridiag& L, const Vec& rhs,
                                             const std::vector<const Vec*>& chi,
                                             const Vec& weights) {
    const std::size_t n = L.diag.size();
    const std::size_t m = chi.size();
    const TridiagLU lu = factor_sym(L);

    std::vector<Vec> xc(m);
    for (std::size_t j = 0; j < m; ++j) {
        xc[j] = *chi[j];
        lu.solve(xc[j]);
    }
    Eigen::MatrixXd S(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += weights[i] * (*chi[j])[i] * xc[k][i];
            S(long(j), long(k)) = s;
        }
    Eigen::PartialPivLU<Eigen::MatrixXd> slu(S);

    auto subsolve = [&](const Vec& r1, const Vec& r2, Vec& x, Vec& mu) {
        Vec t = r1;
        lu.solve(t);
        Eigen::VectorXd g(m);
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += weights[i] * (*chi[j])[i] * t[i];
            g[long(j)] = s - r2[j];
        }
        const Eigen::VectorXd mu_v = slu.solve(g);
        x = std::move(t);
        mu.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            mu[j] = mu_v[long(j)];
            for (std::size_t i = 0; i < n; ++i) x[i] -= mu[j] * xc[j][i];
        }
    };

    BorderedResult out;
    Vec zero_m(m, 0.0);
    subsolve(rhs, zero_m, out.phi, out.mu);

    Vec r1(n), r2(m), dx, dmu;
    for (int round = 0; round < 3; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double ax = L.diag[i] * out.phi[i];
            if (i > 0) ax += L.off[i - 1] * out.phi[i - 1];
            if (i + 1 < n) ax += L.off[i] * out.phi[i + 1];
            for (std::size_t j = 0; j < m; ++j) ax += (*chi[j])[i] * out.mu[j];
            r1[i] = rhs[i] - ax;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += weights[i] * (*chi[j])[i] * out.phi[i];
            r2[j] = -s;
        }
        subsolve(r1, r2, dx, dmu);
        for (std::size_t i = 0; i < n; ++i) out.phi[i] += dx[i];
        for (std::size_t j = 0; j < m; ++j) out.mu[j] += dmu[j];
    }
    return out;
}

// Eigenvalues of the Hermitian pencil A v = mu B v with B positive definite,
// ascending. Reduction through the Cholesky factor of B.
inline Vec hermitian_gep_eigenvalues(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::LLT<Eigen::MatrixXcd> llt(B);
    if (llt.info() != Eigen::Success) throw NonConvergence("gep: B not positive definite");
    const Eigen::MatrixXcd Linv = llt.matrixL().solve(Eigen::MatrixXcd::Identity(B.rows(), B.cols()));
    const Eigen::MatrixXcd C = Linv * A * Linv.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NonConvergence("gep: eigen solve failed");
    Vec out(std::size_t(es.eigenvalues().size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = es.eigenvalues()[int(i)];
    return out;
}

// Same pencil, with B-orthonormal eigenvectors in the columns of V.
inline void hermitian_gep(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, Vec& values,
                          Eigen::MatrixXcd& V) {
    Eigen::LLT<Eigen::MatrixXcd> llt(B);
    if (llt.info() != Eigen::Success) throw NonConvergence("gep: B not positive definite");
    const Eigen::MatrixXcd Linv = llt.matrixL().solve(Eigen::MatrixXcd::Identity(B.rows(), B.cols()));
    const Eigen::MatrixXcd C = Linv * A * Linv.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C);
    if (es.info() != Eigen::Success) throw NonConvergence("gep: eigen solve failed");
    values.resize(std::size_t(es.eigenvalues().size()));
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = es.eigenvalues()[int(i)];
    V = Linv.adjoint() * es.eigenvectors();
}

}  // namespace gpcurve
