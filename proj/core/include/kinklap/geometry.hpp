//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>

#include "kinklap/common.hpp"

namespace kinklap {

enum class DistanceMode { intrinsic, extrinsic };

// ---------------------------------------------------------------------------
// Shapes. All are flat Euclidean regions with finite volume.
// ---------------------------------------------------------------------------

/// Closed ball of given radius centered at the origin.
struct Ball {
    double radius;
};

/// Axis-aligned box prod_i [0, length_i].
struct Box {
    Vec lengths;
};

/// Bounded model of the depth-k corner R^k_+ x R^{d-k}:
/// [0,1]^k x [-1,1]^{d-k}. The unbounded model has infinite measure, so the
/// bounded version stands in while keeping the corner geometry at the origin.
struct OrthantModel {
    int depth;
};

/// Solid cone of the given half-angle about `axis`, apex at the origin,
/// truncated at axis-height 1: the epigraph of cot(alpha) * ||x'|| along the
/// axis. Convex for half-angle <= pi/2.
struct Cone {
    double half_angle;
    Vec axis;  // unit vector
};

/// Bounded cusp region { |y_i| <= 1 (i < d), |y_1|^beta <= y_d <= 1 } with
/// beta in (0, 1). The origin is a cusp: the inward sector has empty
/// interior. Volume is 2^{d-1} beta / (beta + 1).
struct CuspEpigraph {
    double beta;
};

/// Generic epigraph { y in [lo, hi] : y_d >= gamma(y') } of a Lipschitz
/// function given by an evaluator on the box projection.
struct Epigraph {
    std::function<double(const Vec&)> gamma;  // R^{d-1} -> R
    double lipschitz_bound;
    Vec lo;  // d-dim bounding box
    Vec hi;
    double volume;  // exact if supplied, else seeded Monte Carlo estimate
};

using Shape = std::variant<Ball, Box, OrthantModel, Cone, CuspEpigraph, Epigraph>;

/// A flat domain with (possibly) kinked boundary. Immutable after
/// construction and safe to share across threads.
class Domain {
  public:
    static Domain ball(int dim, double radius,
                       DistanceMode mode = DistanceMode::intrinsic);
    static Domain box(Vec lengths, DistanceMode mode = DistanceMode::intrinsic);
    static Domain orthant_model(int dim, int depth,
                                DistanceMode mode = DistanceMode::intrinsic);
    static Domain cone(int dim, double half_angle, Vec axis,
                       DistanceMode mode = DistanceMode::intrinsic);
    static Domain cusp_epigraph(int dim, double beta,
                                DistanceMode mode = DistanceMode::extrinsic);
    /// `volume` < 0 requests a seeded Monte Carlo estimate; the Lipschitz
    /// bound is checked with randomized probes and rejected if violated.
    static Domain epigraph(int dim, std::function<double(const Vec&)> gamma,
                           double lipschitz_bound, Vec lo, Vec hi, double volume = -1.0,
                           DistanceMode mode = DistanceMode::extrinsic);

    int dim() const { return dim_; }
    double volume() const { return volume_; }
    bool convex() const { return convex_; }
    DistanceMode distance_mode() const { return mode_; }
    const Shape& shape() const { return *shape_; }
    /// Characteristic boundary feature size (radius, min edge, ...).
    double feature_scale() const { return feature_scale_; }
    const std::string& id() const { return id_; }

  private:
    Domain() = default;
    int dim_ = 0;
    std::shared_ptr<const Shape> shape_;
    double volume_ = 0.0;
    bool convex_ = false;
    DistanceMode mode_ = DistanceMode::intrinsic;
    double feature_scale_ = 1.0;
    std::string id_;
};

// ---------------------------------------------------------------------------
// Point classification
// ---------------------------------------------------------------------------

struct Interior {};

struct C1Boundary {
    Vec inner_normal;  // unit
};

struct CornerDepthK {
    Mat inward_normals;  // d x k, orthonormal columns, k in [2, d]
    int depth() const { return static_cast<int>(inward_normals.cols()); }
};

/// LCDD kink: the boundary is locally the epigraph of a Lipschitz,
/// continuously directionally differentiable function in the local frame.
struct LcddKink {
    /// v' -> gamma'(x'; v') in local coordinates; may return +-infinity.
    std::function<double(const Vec&)> directional_derivative;
    /// local -> world rotation; last column is the world graph axis.
    Mat frame;
};

/// Border point whose inward sector has empty interior.
struct CuspPoint {
    Mat frame;  // as in LcddKink
};

using PointClassification = std::variant<Interior, C1Boundary, CornerDepthK, LcddKink, CuspPoint>;

// ---------------------------------------------------------------------------
// Sectors: sets of unit inward directions on S^{d-1}
// ---------------------------------------------------------------------------

struct FullSector {};

struct HalfSpaceSector {
    Vec nu;  // unit inward normal
};

struct OrthantSector {
    Mat normals;  // d x k orthonormal columns
    int depth() const { return static_cast<int>(normals.cols()); }
};

struct PredicateSector {
    std::function<bool(const Vec&)> member;  // cone condition on directions
};

struct Sector {
    int dim;
    std::variant<FullSector, HalfSpaceSector, OrthantSector, PredicateSector> kind;
};

/// True if the unit direction theta lies in the sector (closure convention).
bool sector_member(const Sector& sector, const Vec& theta);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Membership in the closed region; exact arithmetic on the defining
/// inequality.
bool contains(const Domain& domain, const Vec& x);

/// Classify a domain point at tolerance `tol` (must be positive and below
/// the feature scale). Throws UnresolvedClassification when the point sits
/// in the ambiguous band between "interior at tol" and "on the boundary".
PointClassification classify(const Domain& domain, const Vec& x, double tol);

/// The inward sector at a classified point.
Sector sector_at(const Domain& domain, const PointClassification& cls);

struct BouligandResult {
    bool contains;
    bool tie;           // |v_d - derivative| within estimator error
    double derivative;  // estimated gamma'(x'; v'), may be +-infinity
    double error;       // estimator error bound (0 when divergent)
};

/// Bouligand-cone membership test at a graph point x of an epigraph-form
/// domain: v is in T^B iff v_d >= gamma'(x'; v'), estimated by one-sided
/// difference quotients along `steps` with Richardson stabilization.
/// Throws FluctuatingDirection when the quotients oscillate.
BouligandResult bouligand_contains(const Domain& domain, const Vec& x, const Vec& v,
                                   std::span<const double> steps);

/// Default step sequence h_j = 2^{-j} h0 with h0 = 1e-2 * feature scale.
BouligandResult bouligand_contains(const Domain& domain, const Vec& x, const Vec& v);

/// Indicator 1_{Omega_{x,t}}(z) = contains(domain, x + t z) of the blown-up
/// domain (Omega - x)/t.
bool blow_up_indicator(const Domain& domain, const Vec& x, const Vec& z, double t);

/// Geodesic distance for convex flat domains (= Euclidean norm). Throws
/// UnsupportedOperation for non-convex domains in intrinsic mode.
double intrinsic_distance(const Domain& domain, const Vec& x, const Vec& y);

/// ||x - y|| regardless of convexity.
double extrinsic_distance(const Domain& domain, const Vec& x, const Vec& y);

// ---------------------------------------------------------------------------
// Axis sections (exact 1-D slices used by the quadrature backend)
// ---------------------------------------------------------------------------

/// True if the shape has an exact 1-D section along `axis`.
bool supports_sections(const Domain& domain, int axis);

/// World-coordinate interval(s) { s : y with y[axis] = s lies in the domain }
/// for fixed off-axis coordinates of y.
SectionSet axis_section(const Domain& domain, int axis, const Vec& y);

/// Axis along which sections are cheapest/smoothest near x; -1 if none.
int preferred_section_axis(const Domain& domain, const Vec& x);

/// Bounding box of the domain (world coords); sections are empty outside it.
void bounding_box(const Domain& domain, Vec& lo, Vec& hi);

// ---------------------------------------------------------------------------
// Directional derivative estimation (shared with bouligand_contains)
// ---------------------------------------------------------------------------

struct DerivativeEstimate {
    double value;  // may be +-infinity
    double error;
    bool divergent;
};

/// One-sided derivative of gamma at base in direction dir from difference
/// quotients over `steps`, Richardson-extrapolated; oscillation beyond
/// `osc_tol` (relative) throws FluctuatingDirection.
DerivativeEstimate estimate_directional_derivative(
    const std::function<double(const Vec&)>& gamma, const Vec& base, const Vec& dir,
    std::span<const double> steps, double osc_tol = 1e-3);

}  // namespace kinklap
