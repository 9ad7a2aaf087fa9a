//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace kinklap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Row-major so that sample rows are contiguous when streaming.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Bad argument or precondition violation.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A point whose classification cannot be resolved at the given tolerance.
struct UnresolvedClassification : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Difference quotients oscillate: the direction is fluctuating/indeterminate.
struct FluctuatingDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested operation is not supported for this input (e.g. intrinsic
/// distance on a non-convex domain).
struct UnsupportedOperation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature hit its refinement cap; carries the best estimate.
struct QuadratureNonConvergence : std::runtime_error {
    QuadratureNonConvergence(const std::string& what, double value, double error)
        : std::runtime_error(what), best_value(value), best_error(error) {}
    double best_value;
    double best_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ArgumentError(msg);
}

/// Closed interval [lo, hi]; empty when hi < lo.
struct Interval {
    double lo;
    double hi;
    bool empty() const { return !(lo <= hi); }
    double length() const { return empty() ? 0.0 : hi - lo; }
};

/// Up to two disjoint intervals (a 1-D section of a region along an axis).
struct SectionSet {
    int count = 0;
    Interval iv[2]{};
    void push(Interval s) {
        if (!s.empty()) iv[count++] = s;
    }
};

inline Interval intersect(Interval a, Interval b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

}  // namespace kinklap
