//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "kinklap/common.hpp"
#include "kinklap/geometry.hpp"

namespace kinklap {

/// Scalar test function with analytic gradient/Hessian where available.
/// Custom fields fall back to finite differences; validate_derivatives()
/// checks the FD results against a refined-step recomputation.
class ScalarField {
  public:
    static ScalarField linear(Vec a);
    static ScalarField quadratic(Mat A, Vec b, double c);
    /// f(x) = x_1 + ... + x_d.
    static ScalarField coordinate_sum(int dim);
    static ScalarField custom(int dim, std::function<double(const Vec&)> f,
                              std::function<Vec(const Vec&)> grad = nullptr,
                              std::function<Mat(const Vec&)> hess = nullptr);

    int dim() const { return dim_; }
    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Mat hessian(const Vec& x) const;
    bool analytic() const { return kind_ != Kind::custom || (grad_ && hess_); }
    const std::string& id() const { return id_; }

    /// Self-consistency gate for finite-difference derivatives: gradient and
    /// Hessian at x recomputed with half the step agree to `rel_tol`.
    bool validate_derivatives(const Vec& x, double rel_tol = 1e-5) const;

  private:
    enum class Kind { linear, quadratic, custom };
    Kind kind_ = Kind::custom;
    int dim_ = 0;
    Vec a_;
    Mat A_;
    Vec b_;
    double c_ = 0.0;
    std::function<double(const Vec&)> f_;
    std::function<Vec(const Vec&)> grad_;
    std::function<Mat(const Vec&)> hess_;
    std::string id_;

    Vec fd_gradient(const Vec& x, double h) const;
    Mat fd_hessian(const Vec& x, double h) const;
};

/// Probability density on a domain (total mass 1 against Lebesgue measure).
class DensityField {
  public:
    static DensityField uniform(const Domain& domain);
    /// p(x) = raw(x) / normalization; grad is of the normalized density.
    static DensityField custom(int dim, std::function<double(const Vec&)> raw,
                               std::function<Vec(const Vec&)> raw_grad, double normalization,
                               std::string smoothness = "C2");

    int dim() const { return dim_; }
    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    bool is_uniform() const { return uniform_; }
    /// Upper bound usable as a rejection envelope for uniform densities.
    double uniform_value() const;
    const std::string& smoothness() const { return smoothness_; }
    const std::string& id() const { return id_; }

  private:
    int dim_ = 0;
    bool uniform_ = false;
    double uval_ = 0.0;
    std::function<double(const Vec&)> p_;
    std::function<Vec(const Vec&)> grad_;
    std::string smoothness_ = "C2";
    std::string id_;
};

}  // namespace kinklap
