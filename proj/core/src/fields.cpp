//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/fields.hpp"

#include <cmath>
#include <cstdio>

namespace kinklap {

ScalarField ScalarField::linear(Vec a) {
    ScalarField f;
    f.kind_ = Kind::linear;
    f.dim_ = static_cast<int>(a.size());
    f.a_ = std::move(a);
    f.id_ = "linear";
    return f;
}

ScalarField ScalarField::quadratic(Mat A, Vec b, double c) {
    require(A.rows() == A.cols() && A.rows() == b.size(), "quadratic: shape mismatch");
    require(A.isApprox(A.transpose(), 1e-12), "quadratic: A must be symmetric");
    ScalarField f;
    f.kind_ = Kind::quadratic;
    f.dim_ = static_cast<int>(b.size());
    f.A_ = std::move(A);
    f.b_ = std::move(b);
    f.c_ = c;
    f.id_ = "quadratic";
    return f;
}

ScalarField ScalarField::coordinate_sum(int dim) {
    ScalarField f = linear(Vec::Ones(dim));
    f.id_ = "coordinate_sum";
    return f;
}

ScalarField ScalarField::custom(int dim, std::function<double(const Vec&)> f,
                                std::function<Vec(const Vec&)> grad,
                                std::function<Mat(const Vec&)> hess) {
    require(static_cast<bool>(f), "custom: evaluator required");
    ScalarField out;
    out.kind_ = Kind::custom;
    out.dim_ = dim;
    out.f_ = std::move(f);
    out.grad_ = std::move(grad);
    out.hess_ = std::move(hess);
    out.id_ = "custom";
    return out;
}

double ScalarField::value(const Vec& x) const {
    require(static_cast<int>(x.size()) == dim_, "ScalarField: dimension mismatch");
    switch (kind_) {
        case Kind::linear:
            return a_.dot(x);
        case Kind::quadratic:
            return 0.5 * x.dot(A_ * x) + b_.dot(x) + c_;
        default:
            return f_(x);
    }
}

Vec ScalarField::gradient(const Vec& x) const {
    switch (kind_) {
        case Kind::linear:
            return a_;
        case Kind::quadratic:
            return A_ * x + b_;
        default:
            if (grad_) return grad_(x);
            return fd_gradient(x, 1e-5 * (1.0 + x.norm()));
    }
}

Mat ScalarField::hessian(const Vec& x) const {
    switch (kind_) {
        case Kind::linear:
            return Mat::Zero(dim_, dim_);
        case Kind::quadratic:
            return A_;
        default:
            if (hess_) return hess_(x);
            return fd_hessian(x, 2e-4 * (1.0 + x.norm()));
    }
}

Vec ScalarField::fd_gradient(const Vec& x, double h) const {
    Vec g(dim_);
    Vec e = x;
    for (int i = 0; i < dim_; ++i) {
        e[i] = x[i] + h;
        double fp = f_(e);
        e[i] = x[i] - h;
        double fm = f_(e);
        e[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Mat ScalarField::fd_hessian(const Vec& x, double h) const {
    Mat H(dim_, dim_);
    Vec e = x;
    double f0 = f_(x);
    for (int i = 0; i < dim_; ++i) {
        e[i] = x[i] + h;
        double fp = f_(e);
        e[i] = x[i] - h;
        double fm = f_(e);
        e[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j) {
            e[i] = x[i] + h;
            e[j] = x[j] + h;
            double fpp = f_(e);
            e[j] = x[j] - h;
            double fpm = f_(e);
            e[i] = x[i] - h;
            double fmm = f_(e);
            e[j] = x[j] + h;
            double fmp = f_(e);
            e[i] = x[i];
            e[j] = x[j];
            H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    return H;
}

bool ScalarField::validate_derivatives(const Vec& x, double rel_tol) const {
    if (kind_ != Kind::custom || (grad_ && hess_)) return true;
    double h = 1e-4 * (1.0 + x.norm());
    Vec g1 = fd_gradient(x, h);
    Vec g2 = fd_gradient(x, 0.5 * h);
    double gs = std::max(1.0, g2.norm());
    if ((g1 - g2).norm() > rel_tol * gs) return false;
    Mat h1 = fd_hessian(x, 20 * h);
    Mat h2 = fd_hessian(x, 10 * h);
    double hs = std::max(1.0, h2.norm());
    return (h1 - h2).norm() <= rel_tol * hs * 10.0;
}

DensityField DensityField::uniform(const Domain& domain) {
    DensityField p;
    p.dim_ = domain.dim();
    p.uniform_ = true;
    p.uval_ = 1.0 / domain.volume();
    p.smoothness_ = "C_inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "uniform(%.17g)", p.uval_);
    p.id_ = buf;
    return p;
}

DensityField DensityField::custom(int dim, std::function<double(const Vec&)> raw,
                                  std::function<Vec(const Vec&)> raw_grad, double normalization,
                                  std::string smoothness) {
    require(static_cast<bool>(raw), "DensityField: evaluator required");
    require(normalization > 0.0, "DensityField: normalization must be positive");
    DensityField p;
    p.dim_ = dim;
    double z = normalization;
    p.p_ = [raw, z](const Vec& x) { return raw(x) / z; };
    if (raw_grad)
        p.grad_ = [raw_grad, z](const Vec& x) { return Vec(raw_grad(x) / z); };
    p.smoothness_ = std::move(smoothness);
    p.id_ = "custom_density";
    return p;
}

double DensityField::value(const Vec& x) const {
    require(static_cast<int>(x.size()) == dim_, "DensityField: dimension mismatch");
    return uniform_ ? uval_ : p_(x);
}

Vec DensityField::gradient(const Vec& x) const {
    if (uniform_) return Vec::Zero(dim_);
    if (grad_) return grad_(x);
    // central differences
    Vec g(dim_);
    Vec e = x;
    double h = 1e-6 * (1.0 + x.norm());
    for (int i = 0; i < dim_; ++i) {
        e[i] = x[i] + h;
        double fp = p_(e);
        e[i] = x[i] - h;
        double fm = p_(e);
        e[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double DensityField::uniform_value() const {
    require(uniform_, "DensityField: not a uniform density");
    return uval_;
}

}  // namespace kinklap
