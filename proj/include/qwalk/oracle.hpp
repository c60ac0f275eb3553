// Copyright 2026 The qwalk Authors
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

/**
 * @file
 * Dense classical reference computations. Simulator results are compared
 * against these, never the other way round.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/chebyshev.hpp"
#include "qwalk/error.hpp"

namespace qwalk {

using Vector = std::vector<double>;

/// Row-major dense real matrix.
class DenseMatrix {
   public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    static DenseMatrix identity(std::size_t n, double scale = 1.0) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
        return m;
    }

    std::size_t size() const { return n_; }
    double &operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<double> &data() const { return a_; }

    bool isSymmetric() const {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                if ((*this)(i, j) != (*this)(j, i)) return false;
            }
        }
        return true;
    }

    DenseMatrix scaled(double f) const {
        DenseMatrix m = *this;
        for (double &x : m.a_) x *= f;
        return m;
    }

    Vector apply(const Vector &x) const {
        if (x.size() != n_) throw Error(Errc::InvalidArgument, "vector length does not match matrix");
        Vector y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) acc += (*this)(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    friend bool operator==(const DenseMatrix &, const DenseMatrix &) = default;

   private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

inline double dot(const Vector &a, const Vector &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector &a) { return std::sqrt(dot(a, a)); }

inline Vector normalized(Vector v) {
    const double n = norm2(v);
    if (n == 0.0) throw Error(Errc::ZeroNorm, "cannot normalize a zero vector");
    for (double &x : v) x /= n;
    return v;
}

namespace detail {

inline Eigen::MatrixXd toEigen(const DenseMatrix &m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd e(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) e(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    return e;
}

}  // namespace detail

/// t_0 = b, t_1 = Hb, t_{n+1} = 2 H t_n - t_{n-1}.
inline std::vector<Vector> chebApply(const DenseMatrix &h, const Vector &b, std::size_t nMax) {
    std::vector<Vector> t;
    t.reserve(nMax + 1);
    t.push_back(b);
    if (nMax >= 1) t.push_back(h.apply(b));
    for (std::size_t n = 1; n < nMax; ++n) {
        Vector next = h.apply(t[n]);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = 2.0 * next[i] - t[n - 1][i];
        t.push_back(std::move(next));
    }
    return t;
}

/// Solves Ax = b by LU with partial pivoting.
inline Vector linSolve(const DenseMatrix &a, const Vector &b) {
    if (b.size() != a.size()) throw Error(Errc::InvalidArgument, "right-hand side length does not match matrix");
    const Eigen::MatrixXd e = detail::toEigen(a);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(e);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal();
    const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
    if (diag.size() > 0 && diag.cwiseAbs().minCoeff() <= 1e-14 * scale) {
        throw Error(Errc::Singular, "matrix is singular to working precision");
    }
    const Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
    return Vector(x.data(), x.data() + x.size());
}

/// Eigenvalues of a symmetric matrix, ascending.
inline Vector symmetricEigenvalues(const DenseMatrix &h) {
    if (!h.isSymmetric()) throw Error(Errc::InvalidArgument, "eigenvalues requested for a non-symmetric matrix");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::toEigen(h), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    return Vector(ev.data(), ev.data() + ev.size());
}

inline double minAbsEigenvalue(const DenseMatrix &h) {
    double best = INFINITY;
    for (double e : symmetricEigenvalues(h)) best = std::min(best, std::abs(e));
    return best;
}

/// Success rate and fidelity predicted for the accumulated state.
struct TheoryPoint {
    double p = 0.0;
    double f = 0.0;
};

/// Per-step theory curve for sum_{k<=j} a_k T_{2k+1}(H) b.
///
/// The accumulated walk state is sum_k a_k tau_k with unit-norm tau_k and
/// <tau_k|tau_m> = b . T_{2|m-k|}(H) b, so its squared norm follows from the
/// moments g_n = b . t_n without materializing any walk state.
class TheoryCurve {
   public:
    TheoryCurve(DenseMatrix h, Vector b, std::vector<double> coeffs)
        : h_(std::move(h)), b_(std::move(b)), coeffs_(std::move(coeffs)) {
        x_ = normalized(linSolve(h_, b_));
        prev_ = b_;
        cur_ = h_.apply(b_);
        order_ = 1;
        moments_.push_back(dot(b_, b_));
        moments_.push_back(dot(b_, cur_));
        v_.assign(b_.size(), 0.0);
    }

    std::size_t nextStep() const { return step_; }
    const Vector &target() const { return x_; }
    /// sum_{k<=j} a_k t_{2k+1} after the latest call to advance().
    const Vector &partialSum() const { return v_; }

    TheoryPoint advance() {
        if (step_ >= coeffs_.size()) throw Error(Errc::InvalidArgument, "theory curve ran past the last coefficient");
        const std::size_t j = step_;
        while (order_ < 2 * j + 1) stepRecurrence();
        const double aj = coeffs_[j];
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += aj * cur_[i];
        while (moments_.size() <= 2 * j) stepRecurrence();
        double cross = 0.0;
        for (std::size_t k = 0; k < j; ++k) cross += coeffs_[k] * moments_[2 * (j - k)];
        accNorm2_ += aj * aj * moments_[0] + 2.0 * aj * cross;
        ++step_;

        TheoryPoint tp;
        const double flag0 = dot(v_, v_);
        tp.p = accNorm2_ > 0.0 ? flag0 / accNorm2_ : 0.0;
        const double overlap = dot(x_, v_);
        tp.f = flag0 > 0.0 ? overlap * overlap / flag0 : 0.0;
        return tp;
    }

   private:
    void stepRecurrence() {
        Vector next = h_.apply(cur_);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = 2.0 * next[i] - prev_[i];
        prev_ = std::move(cur_);
        cur_ = std::move(next);
        ++order_;
        if (moments_.size() == order_) moments_.push_back(dot(b_, cur_));
    }

    DenseMatrix h_;
    Vector b_;
    std::vector<double> coeffs_;
    Vector x_;
    Vector prev_, cur_;
    std::size_t order_ = 0;
    std::vector<double> moments_;
    Vector v_;
    double accNorm2_ = 0.0;
    std::size_t step_ = 0;
};

struct FApplyResult {
    Vector value;
    TheoryPoint theory;
};

/// sum_{k=0}^{j} a_k T_{2k+1}(H) b together with its theory point.
inline FApplyResult fApply(const DenseMatrix &h, const Vector &b, const ChebyshevPlan &plan, std::size_t j) {
    if (j > plan.j0 || j >= plan.coeffs.size()) throw Error(Errc::InvalidArgument, "step beyond the plan horizon");
    TheoryCurve curve(h, b, plan.coeffs);
    FApplyResult r;
    for (std::size_t k = 0; k <= j; ++k) r.theory = curve.advance();
    r.value = curve.partialSum();
    return r;
}

}  // namespace qwalk
