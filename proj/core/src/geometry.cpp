//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

#include "kinklap/rng.hpp"
#include "kinklap/specfun.hpp"
#include "kinklap/summation.hpp"

namespace kinklap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double boundary_eps(const Domain& d) { return 1e-10 * std::max(1.0, d.feature_scale()); }

std::string format_id(const char* fmt, ...) {
    char buf[160];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

/// Orthonormal frame whose last column is the unit vector u.
Mat frame_with_last_axis(const Vec& u) {
    const int d = static_cast<int>(u.size());
    Mat frame(d, d);
    // Start from the identity, replace the column most aligned with u,
    // then re-orthonormalize (modified Gram-Schmidt) and move u last.
    int drop = 0;
    u.cwiseAbs().maxCoeff(&drop);
    std::vector<Vec> cols;
    cols.push_back(u.normalized());
    for (int i = 0; i < d; ++i) {
        if (i == drop) continue;
        Vec e = Vec::Zero(d);
        e[i] = 1.0;
        for (const Vec& c : cols) e -= (c.dot(e)) * c;
        cols.push_back(e.normalized());
    }
    for (int i = 1; i < d; ++i) frame.col(i - 1) = cols[i];
    frame.col(d - 1) = cols[0];
    return frame;
}

/// Kink evaluator for the intersection of halfspaces {v . n_i >= 0} written
/// as an epigraph along the inward mean direction of the normals.
LcddKink halfspace_intersection_kink(const std::vector<Vec>& normals) {
    Vec mean = normals[0];
    for (std::size_t i = 1; i < normals.size(); ++i) mean += normals[i];
    Mat frame = frame_with_last_axis(mean.normalized());
    const int d = static_cast<int>(mean.size());
    Mat head = frame.leftCols(d - 1);
    Vec axis = frame.col(d - 1);
    auto ns = normals;
    auto deriv = [head, axis, ns](const Vec& vp) {
        double best = -kInf;
        for (const Vec& n : ns) {
            double denom = axis.dot(n);
            double num = -(head * vp).dot(n);
            best = std::max(best, num / denom);
        }
        return best;
    };
    return LcddKink{deriv, frame};
}

struct EpigraphView {
    std::function<double(const Vec&)> gamma;  // local (d-1) -> graph height
    Mat frame;                                // local -> world
    bool valid = false;
};

/// Epigraph-form view (gamma, frame) of shapes that are graphs along an axis.
EpigraphView epigraph_view(const Domain& domain) {
    EpigraphView view;
    const int d = domain.dim();
    if (const auto* e = std::get_if<Epigraph>(&domain.shape())) {
        view.gamma = e->gamma;
        view.frame = Mat::Identity(d, d);
        view.valid = true;
    } else if (const auto* c = std::get_if<CuspEpigraph>(&domain.shape())) {
        double beta = c->beta;
        view.gamma = [beta](const Vec& w) { return std::pow(std::abs(w[0]), beta); };
        view.frame = Mat::Identity(d, d);
        view.valid = true;
    } else if (const auto* k = std::get_if<Cone>(&domain.shape())) {
        double cot = 1.0 / std::tan(k->half_angle);
        view.gamma = [cot](const Vec& w) { return cot * w.norm(); };
        view.frame = frame_with_last_axis(k->axis);
        view.valid = true;
    }
    return view;
}

double cusp_volume(int d, double beta) {
    return std::pow(2.0, d - 1) * beta / (beta + 1.0);
}

/// Distance from the plane point (x1, xd) to the curve {(u, |u|^beta)},
/// u in [-1, 1]. The curve has unbounded slope at 0, so a vertical-gap bound
/// is not valid; minimize directly instead.
double cusp_graph_distance(double x1, double xd, double beta) {
    auto dist2 = [&](double u) {
        double du = x1 - u;
        double dv = xd - std::pow(std::abs(u), beta);
        return du * du + dv * dv;
    };
    const int grid = 400;
    double best_u = -1.0;
    double best = dist2(-1.0);
    for (int i = 1; i <= grid; ++i) {
        double u = -1.0 + 2.0 * i / grid;
        double v = dist2(u);
        if (v < best) {
            best = v;
            best_u = u;
        }
    }
    double a = std::max(-1.0, best_u - 2.0 / grid);
    double b = std::min(1.0, best_u + 2.0 / grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double e = a + gr * (b - a);
    for (int it = 0; it < 60; ++it) {
        if (dist2(c) < dist2(e))
            b = e;
        else
            a = c;
        c = b - gr * (b - a);
        e = a + gr * (b - a);
    }
    return std::sqrt(dist2(0.5 * (a + b)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain construction
// ---------------------------------------------------------------------------

Domain Domain::ball(int dim, double radius, DistanceMode mode) {
    require(dim >= 1, "ball: dim must be positive");
    require(radius > 0.0, "ball: radius must be positive");
    Domain d;
    d.dim_ = dim;
    d.shape_ = std::make_shared<Shape>(Ball{radius});
    d.volume_ = unit_ball_volume(dim) * std::pow(radius, dim);
    d.convex_ = true;
    d.mode_ = mode;
    d.feature_scale_ = radius;
    d.id_ = format_id("ball(d=%d,r=%.17g)", dim, radius);
    return d;
}

Domain Domain::box(Vec lengths, DistanceMode mode) {
    const int dim = static_cast<int>(lengths.size());
    require(dim >= 1, "box: dim must be positive");
    require((lengths.array() > 0.0).all(), "box: edge lengths must be positive");
    Domain d;
    d.dim_ = dim;
    d.volume_ = lengths.prod();
    d.shape_ = std::make_shared<Shape>(Box{std::move(lengths)});
    d.convex_ = true;
    d.mode_ = mode;
    d.feature_scale_ = std::get<Box>(*d.shape_).lengths.minCoeff();
    d.id_ = format_id("box(d=%d)", dim);
    return d;
}

Domain Domain::orthant_model(int dim, int depth, DistanceMode mode) {
    require(dim >= 1, "orthant_model: dim must be positive");
    require(depth >= 1 && depth <= dim, "orthant_model: depth must be in [1, dim]");
    Domain d;
    d.dim_ = dim;
    d.shape_ = std::make_shared<Shape>(OrthantModel{depth});
    d.volume_ = std::pow(2.0, dim - depth);
    d.convex_ = true;
    d.mode_ = mode;
    d.feature_scale_ = 1.0;
    d.id_ = format_id("orthant(d=%d,k=%d)", dim, depth);
    return d;
}

Domain Domain::cone(int dim, double half_angle, Vec axis, DistanceMode mode) {
    require(dim >= 2, "cone: dim must be >= 2");
    require(half_angle > 0.0 && half_angle < 0.5 * std::numbers::pi,
            "cone: half_angle must be in (0, pi/2)");
    require(static_cast<int>(axis.size()) == dim, "cone: axis dimension mismatch");
    require(axis.norm() > 0.0, "cone: axis must be nonzero");
    axis.normalize();
    Domain d;
    d.dim_ = dim;
    double tana = std::tan(half_angle);
    d.volume_ = unit_ball_volume(dim - 1) * std::pow(tana, dim - 1) / dim;
    d.shape_ = std::make_shared<Shape>(Cone{half_angle, std::move(axis)});
    d.convex_ = true;
    d.mode_ = mode;
    d.feature_scale_ = std::min(1.0, tana);
    d.id_ = format_id("cone(d=%d,alpha=%.17g)", dim, half_angle);
    return d;
}

Domain Domain::cusp_epigraph(int dim, double beta, DistanceMode mode) {
    require(dim >= 2, "cusp_epigraph: dim must be >= 2");
    require(beta > 0.0 && beta < 1.0, "cusp_epigraph: beta must be in (0, 1)");
    Domain d;
    d.dim_ = dim;
    d.shape_ = std::make_shared<Shape>(CuspEpigraph{beta});
    d.volume_ = cusp_volume(dim, beta);
    d.convex_ = false;
    d.mode_ = mode;
    d.feature_scale_ = 1.0;
    d.id_ = format_id("cusp(d=%d,beta=%.17g)", dim, beta);
    return d;
}

Domain Domain::epigraph(int dim, std::function<double(const Vec&)> gamma,
                        double lipschitz_bound, Vec lo, Vec hi, double volume,
                        DistanceMode mode) {
    require(dim >= 2, "epigraph: dim must be >= 2");
    require(lipschitz_bound >= 0.0, "epigraph: lipschitz_bound must be nonnegative");
    require(static_cast<int>(lo.size()) == dim && static_cast<int>(hi.size()) == dim,
            "epigraph: bounding box dimension mismatch");
    require((hi.array() > lo.array()).all(), "epigraph: empty bounding box");

    // Probe the Lipschitz bound on random pairs of the box projection.
    const int m = dim - 1;
    double scale = (hi - lo).head(m).norm();
    for (int probe = 0; probe < 512; ++probe) {
        CounterRng rng(0x4C697073ull, probe);
        Vec a(m), b(m);
        for (int i = 0; i < m; ++i) a[i] = lo[i] + (hi[i] - lo[i]) * rng.next_double();
        for (int i = 0; i < m; ++i) b[i] = lo[i] + (hi[i] - lo[i]) * rng.next_double();
        double lhs = std::abs(gamma(a) - gamma(b));
        double rhs = lipschitz_bound * (a - b).norm() * (1.0 + 1e-9) + 1e-12 * (1.0 + scale);
        require(lhs <= rhs, "epigraph: lipschitz_bound violated by probe pair");
    }

    Domain d;
    d.dim_ = dim;
    if (volume < 0.0) {
        // Seeded Monte Carlo over the projection with the exact 1-D section.
        const std::size_t n = 1u << 16;
        KahanSum acc;
        double proj_area = 1.0;
        for (int i = 0; i < m; ++i) proj_area *= hi[i] - lo[i];
        for (std::size_t s = 0; s < n; ++s) {
            CounterRng rng(0x45706956ull, s);
            Vec y(m);
            for (int i = 0; i < m; ++i) y[i] = lo[i] + (hi[i] - lo[i]) * rng.next_double();
            double g = std::max(gamma(y), lo[dim - 1]);
            acc.add(std::max(0.0, hi[dim - 1] - g));
        }
        volume = proj_area * acc.value() / static_cast<double>(n);
    }
    require(volume > 0.0, "epigraph: region has zero volume");
    d.volume_ = volume;
    d.shape_ = std::make_shared<Shape>(Epigraph{std::move(gamma), lipschitz_bound, lo, hi, volume});
    d.convex_ = false;
    d.mode_ = mode;
    d.feature_scale_ = (hi - lo).minCoeff();
    d.id_ = format_id("epigraph(d=%d,L=%.17g)", dim, lipschitz_bound);
    return d;
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

bool contains(const Domain& domain, const Vec& x) {
    require(static_cast<int>(x.size()) == domain.dim(), "contains: dimension mismatch");
    const int d = domain.dim();
    return std::visit(
        [&](const auto& shape) -> bool {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Ball>) {
                return x.squaredNorm() <= shape.radius * shape.radius;
            } else if constexpr (std::is_same_v<S, Box>) {
                for (int i = 0; i < d; ++i)
                    if (x[i] < 0.0 || x[i] > shape.lengths[i]) return false;
                return true;
            } else if constexpr (std::is_same_v<S, OrthantModel>) {
                for (int i = 0; i < shape.depth; ++i)
                    if (x[i] < 0.0 || x[i] > 1.0) return false;
                for (int i = shape.depth; i < d; ++i)
                    if (x[i] < -1.0 || x[i] > 1.0) return false;
                return true;
            } else if constexpr (std::is_same_v<S, Cone>) {
                double h = shape.axis.dot(x);
                if (h < 0.0 || h > 1.0) return false;
                double rho2 = (x - h * shape.axis).squaredNorm();
                double tana = std::tan(shape.half_angle);
                return rho2 <= h * h * tana * tana;
            } else if constexpr (std::is_same_v<S, CuspEpigraph>) {
                for (int i = 0; i < d - 1; ++i)
                    if (x[i] < -1.0 || x[i] > 1.0) return false;
                if (x[d - 1] > 1.0) return false;
                return x[d - 1] >= std::pow(std::abs(x[0]), shape.beta);
            } else {
                const Epigraph& e = shape;
                for (int i = 0; i < d; ++i)
                    if (x[i] < e.lo[i] || x[i] > e.hi[i]) return false;
                return x[d - 1] >= e.gamma(x.head(d - 1));
            }
        },
        domain.shape());
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace {

/// Face-based classification shared by Box and OrthantModel.
PointClassification classify_faces(const Vec& x, const Vec& lo, const Vec& hi, double tol,
                                   double eps) {
    const int d = static_cast<int>(x.size());
    std::vector<Vec> normals;
    double min_dist = kInf;
    for (int i = 0; i < d; ++i) {
        double dlo = x[i] - lo[i];
        double dhi = hi[i] - x[i];
        if (dlo <= eps) {
            Vec n = Vec::Zero(d);
            n[i] = 1.0;
            normals.push_back(n);
        } else if (dhi <= eps) {
            Vec n = Vec::Zero(d);
            n[i] = -1.0;
            normals.push_back(n);
        } else {
            min_dist = std::min(min_dist, std::min(dlo, dhi));
        }
    }
    if (normals.empty()) {
        if (min_dist > tol) return Interior{};
        throw UnresolvedClassification("classify: point within tol of a face but not on it");
    }
    if (normals.size() == 1) return C1Boundary{normals[0]};
    Mat N(d, static_cast<int>(normals.size()));
    for (std::size_t i = 0; i < normals.size(); ++i) N.col(static_cast<int>(i)) = normals[i];
    return CornerDepthK{N};
}

}  // namespace

PointClassification classify(const Domain& domain, const Vec& x, double tol) {
    require(static_cast<int>(x.size()) == domain.dim(), "classify: dimension mismatch");
    require(contains(domain, x), "classify: point lies outside the domain");
    require(tol > 0.0 && tol < domain.feature_scale(),
            "classify: tol must be positive and below the feature scale");
    const int d = domain.dim();
    const double eps = boundary_eps(domain);

    return std::visit(
        [&](const auto& shape) -> PointClassification {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Ball>) {
                double gap = shape.radius - x.norm();
                if (gap <= eps) return C1Boundary{Vec(-x.normalized())};
                if (gap > tol) return Interior{};
                throw UnresolvedClassification("classify: point within tol of the sphere");
            } else if constexpr (std::is_same_v<S, Box>) {
                return classify_faces(x, Vec::Zero(d), shape.lengths, tol, eps);
            } else if constexpr (std::is_same_v<S, OrthantModel>) {
                Vec lo(d), hi(d);
                for (int i = 0; i < d; ++i) {
                    lo[i] = i < shape.depth ? 0.0 : -1.0;
                    hi[i] = 1.0;
                }
                return classify_faces(x, lo, hi, tol, eps);
            } else if constexpr (std::is_same_v<S, Cone>) {
                double tana = std::tan(shape.half_angle);
                double h = shape.axis.dot(x);
                Vec trans = x - h * shape.axis;
                double rho = trans.norm();
                if (x.norm() <= eps) {
                    // Apex: epigraph of cot(alpha)*||v'|| in the axis frame.
                    double cot = 1.0 / tana;
                    Mat frame = frame_with_last_axis(shape.axis);
                    auto deriv = [cot](const Vec& vp) { return cot * vp.norm(); };
                    return LcddKink{deriv, frame};
                }
                // Perpendicular distance to the lateral surface from inside.
                double lat = (h * tana - rho) * std::cos(shape.half_angle);
                double base = 1.0 - h;
                bool lat_active = lat <= eps;
                bool base_active = base <= eps;
                if (lat_active && base_active) {
                    Vec rad = rho > 0 ? Vec(trans / rho)
                                      : Vec(frame_with_last_axis(shape.axis).col(0));
                    Vec n_lat = std::sin(shape.half_angle) * shape.axis -
                                std::cos(shape.half_angle) * rad;
                    Vec n_base = -shape.axis;
                    return halfspace_intersection_kink({n_lat, n_base});
                }
                if (lat_active) {
                    Vec rad = trans / rho;
                    Vec n = std::sin(shape.half_angle) * shape.axis -
                            std::cos(shape.half_angle) * rad;
                    return C1Boundary{n};
                }
                if (base_active) return C1Boundary{Vec(-shape.axis)};
                if (std::min(lat, base) > tol) return Interior{};
                throw UnresolvedClassification("classify: cone point within tol of a face");
            } else if constexpr (std::is_same_v<S, CuspEpigraph>) {
                double g = std::pow(std::abs(x[0]), shape.beta);
                double graph_gap = x[d - 1] - g;
                bool on_graph = graph_gap <= eps;
                bool box_active = false;
                double box_dist = kInf;
                for (int i = 0; i < d - 1; ++i) {
                    double dist = 1.0 - std::abs(x[i]);
                    if (dist <= eps) box_active = true;
                    box_dist = std::min(box_dist, dist);
                }
                double top = 1.0 - x[d - 1];
                if (top <= eps) box_active = true;
                box_dist = std::min(box_dist, top);
                if (on_graph && box_active)
                    throw UnresolvedClassification("classify: cusp graph meets the bounding box");
                if (on_graph) {
                    if (std::abs(x[0]) <= eps) return CuspPoint{Mat::Identity(d, d)};
                    Vec n = Vec::Zero(d);
                    n[0] = -shape.beta * std::pow(std::abs(x[0]), shape.beta - 1.0) *
                           (x[0] > 0 ? 1.0 : -1.0);
                    n[d - 1] = 1.0;
                    n.normalize();
                    return C1Boundary{n};
                }
                if (box_active) {
                    Vec lo = Vec::Constant(d, -1.0);
                    lo[d - 1] = 0.0;  // graph handled above; only box faces here
                    return classify_faces(x, lo, Vec::Constant(d, 1.0), tol, eps);
                }
                double graph_dist = cusp_graph_distance(x[0], x[d - 1], shape.beta);
                if (std::min(box_dist, graph_dist) > tol) return Interior{};
                throw UnresolvedClassification("classify: cusp point within tol of the boundary");
            } else {
                const Epigraph& e = shape;
                Vec xp = x.head(d - 1);
                double g = e.gamma(xp);
                double graph_gap = x[d - 1] - g;
                bool on_graph = graph_gap <= eps * (1.0 + std::abs(g));
                bool box_active = false;
                double box_dist = kInf;
                for (int i = 0; i < d; ++i) {
                    double dist = std::min(x[i] - e.lo[i], e.hi[i] - x[i]);
                    if (dist <= eps) box_active = true;
                    box_dist = std::min(box_dist, dist);
                }
                if (on_graph && box_active)
                    throw UnresolvedClassification("classify: graph meets the bounding box");
                if (on_graph) {
                    auto gamma = e.gamma;
                    double h0 = 1e-2 * domain.feature_scale();
                    auto steps = std::make_shared<std::vector<double>>();
                    for (int j = 0; j <= 20; ++j) steps->push_back(h0 * std::pow(2.0, -j));
                    auto deriv = [gamma, xp, steps](const Vec& vp) {
                        return estimate_directional_derivative(gamma, xp, vp, *steps).value;
                    };
                    return LcddKink{deriv, Mat::Identity(d, d)};
                }
                if (box_active) return classify_faces(x, e.lo, e.hi, tol, eps);
                // Lipschitz bound turns the vertical gap into a true distance bound.
                double graph_dist = graph_gap / std::sqrt(1.0 + e.lipschitz_bound * e.lipschitz_bound);
                if (std::min(box_dist, graph_dist) > tol) return Interior{};
                throw UnresolvedClassification("classify: epigraph point within tol of the boundary");
            }
        },
        domain.shape());
}

// ---------------------------------------------------------------------------
// Sectors
// ---------------------------------------------------------------------------

Sector sector_at(const Domain& domain, const PointClassification& cls) {
    const int d = domain.dim();
    return std::visit(
        [&](const auto& c) -> Sector {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, Interior>) {
                return {d, FullSector{}};
            } else if constexpr (std::is_same_v<C, C1Boundary>) {
                return {d, HalfSpaceSector{c.inner_normal}};
            } else if constexpr (std::is_same_v<C, CornerDepthK>) {
                return {d, OrthantSector{c.inward_normals}};
            } else if constexpr (std::is_same_v<C, LcddKink>) {
                auto deriv = c.directional_derivative;
                Mat frame_t = c.frame.transpose();
                auto member = [deriv, frame_t, d](const Vec& theta) {
                    Vec w = frame_t * theta;
                    double g = deriv(w.head(d - 1));
                    if (g == kInf) return false;
                    if (g == -kInf) return true;
                    return w[d - 1] >= g - 1e-12 * (1.0 + std::abs(g));
                };
                return {d, PredicateSector{member}};
            } else {
                Mat frame_t = c.frame.transpose();
                auto member = [frame_t, d](const Vec& theta) {
                    Vec w = frame_t * theta;
                    return w[0] == 0.0 && w[d - 1] >= 0.0;
                };
                return {d, PredicateSector{member}};
            }
        },
        cls);
}

bool sector_member(const Sector& sector, const Vec& theta) {
    return std::visit(
        [&](const auto& k) -> bool {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, FullSector>) {
                return true;
            } else if constexpr (std::is_same_v<K, HalfSpaceSector>) {
                return k.nu.dot(theta) >= 0.0;
            } else if constexpr (std::is_same_v<K, OrthantSector>) {
                for (int i = 0; i < k.depth(); ++i)
                    if (k.normals.col(i).dot(theta) < 0.0) return false;
                return true;
            } else {
                return k.member(theta);
            }
        },
        sector.kind);
}

// ---------------------------------------------------------------------------
// Bouligand cone membership
// ---------------------------------------------------------------------------

DerivativeEstimate estimate_directional_derivative(const std::function<double(const Vec&)>& gamma,
                                                   const Vec& base, const Vec& dir,
                                                   std::span<const double> steps, double osc_tol) {
    require(steps.size() >= 3, "estimate_directional_derivative: need at least 3 steps");
    for (std::size_t j = 0; j + 1 < steps.size(); ++j)
        require(steps[j] > steps[j + 1] && steps[j + 1] > 0.0,
                "estimate_directional_derivative: steps must be positive decreasing");

    const double g0 = gamma(base);
    std::vector<double> q(steps.size());
    for (std::size_t j = 0; j < steps.size(); ++j)
        q[j] = (gamma(base + steps[j] * dir) - g0) / steps[j];

    // Richardson pairs: linear extrapolation of (h, q(h)) to h = 0.
    std::vector<double> r(steps.size() - 1);
    for (std::size_t j = 0; j + 1 < steps.size(); ++j)
        r[j] = q[j + 1] + (q[j + 1] - q[j]) * steps[j + 1] / (steps[j] - steps[j + 1]);

    const std::size_t tail = std::min<std::size_t>(4, r.size());
    double rmax = -kInf, rmin = kInf;
    for (std::size_t j = r.size() - tail; j < r.size(); ++j) {
        rmax = std::max(rmax, r[j]);
        rmin = std::min(rmin, r[j]);
    }
    double spread = rmax - rmin;
    double ref = std::max(1.0, std::abs(r.back()));
    if (std::isfinite(spread) && spread <= osc_tol * ref) {
        return {r.back(), spread + 1e-14 * ref, false};
    }

    // Monotone growth of |q| across the whole sequence: divergent direction.
    bool monotone = true;
    for (std::size_t j = 0; j + 1 < q.size(); ++j)
        if (std::abs(q[j + 1]) < std::abs(q[j]) * (1.0 - 1e-9)) monotone = false;
    if (monotone && std::abs(q.back()) >= 2.0 * (1.0 + std::abs(q.front()))) {
        return {q.back() > 0 ? kInf : -kInf, 0.0, true};
    }
    throw FluctuatingDirection(
        "estimate_directional_derivative: difference quotients oscillate beyond tolerance");
}

BouligandResult bouligand_contains(const Domain& domain, const Vec& x, const Vec& v,
                                   std::span<const double> steps) {
    require(static_cast<int>(x.size()) == domain.dim() &&
                static_cast<int>(v.size()) == domain.dim(),
            "bouligand_contains: dimension mismatch");
    EpigraphView view = epigraph_view(domain);
    require(view.valid, "bouligand_contains: domain is not of epigraph form");
    const int d = domain.dim();
    Vec w = view.frame.transpose() * x;
    Vec wp = w.head(d - 1);
    require(std::abs(w[d - 1] - view.gamma(wp)) <= 1e-10,
            "bouligand_contains: x is not on the graph of gamma");
    Vec u = view.frame.transpose() * v;
    Vec up = u.head(d - 1);

    DerivativeEstimate est = estimate_directional_derivative(view.gamma, wp, up, steps);
    if (est.divergent) {
        bool in = est.value == -kInf;
        return {in, false, est.value, 0.0};
    }
    double ud = u[d - 1];
    bool tie = std::abs(ud - est.value) <= est.error;
    bool in = ud >= est.value - est.error;  // ties resolve toward inclusion
    return {in, tie, est.value, est.error};
}

BouligandResult bouligand_contains(const Domain& domain, const Vec& x, const Vec& v) {
    double h0 = 1e-2 * domain.feature_scale();
    std::vector<double> steps;
    for (int j = 0; j <= 20; ++j) steps.push_back(h0 * std::pow(2.0, -j));
    return bouligand_contains(domain, x, v, steps);
}

bool blow_up_indicator(const Domain& domain, const Vec& x, const Vec& z, double t) {
    require(t > 0.0, "blow_up_indicator: t must be positive");
    return contains(domain, Vec(x + t * z));
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

double extrinsic_distance(const Domain& domain, const Vec& x, const Vec& y) {
    require(contains(domain, x) && contains(domain, y),
            "distance: both points must lie in the domain");
    return (x - y).norm();
}

double intrinsic_distance(const Domain& domain, const Vec& x, const Vec& y) {
    require(contains(domain, x) && contains(domain, y),
            "distance: both points must lie in the domain");
    if (!domain.convex())
        throw UnsupportedOperation(
            "intrinsic_distance: unsupported on non-convex domains; use extrinsic mode");
    return (x - y).norm();
}

// ---------------------------------------------------------------------------
// Axis sections
// ---------------------------------------------------------------------------

bool supports_sections(const Domain& domain, int axis) {
    const int d = domain.dim();
    if (axis < 0 || axis >= d) return false;
    return std::visit(
        [&](const auto& shape) -> bool {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Cone>) {
                int idx;
                double m = shape.axis.cwiseAbs().maxCoeff(&idx);
                return m >= 1.0 - 1e-14;  // axis-aligned cones only
            } else if constexpr (std::is_same_v<S, Epigraph>) {
                return axis == d - 1;
            } else {
                return true;
            }
        },
        domain.shape());
}

SectionSet axis_section(const Domain& domain, int axis, const Vec& y) {
    const int d = domain.dim();
    SectionSet out;
    std::visit(
        [&](const auto& shape) {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Ball>) {
                double off = y.squaredNorm() - y[axis] * y[axis];
                double w = shape.radius * shape.radius - off;
                if (w >= 0.0) {
                    double s = std::sqrt(w);
                    out.push({-s, s});
                }
            } else if constexpr (std::is_same_v<S, Box>) {
                for (int i = 0; i < d; ++i)
                    if (i != axis && (y[i] < 0.0 || y[i] > shape.lengths[i])) return;
                out.push({0.0, shape.lengths[axis]});
            } else if constexpr (std::is_same_v<S, OrthantModel>) {
                for (int i = 0; i < d; ++i) {
                    if (i == axis) continue;
                    double lo = i < shape.depth ? 0.0 : -1.0;
                    if (y[i] < lo || y[i] > 1.0) return;
                }
                out.push({axis < shape.depth ? 0.0 : -1.0, 1.0});
            } else if constexpr (std::is_same_v<S, Cone>) {
                int ax_idx;
                shape.axis.cwiseAbs().maxCoeff(&ax_idx);
                double sign = shape.axis[ax_idx] > 0 ? 1.0 : -1.0;
                double tana = std::tan(shape.half_angle);
                if (axis == ax_idx) {
                    double rho2 = 0.0;
                    for (int i = 0; i < d; ++i)
                        if (i != ax_idx) rho2 += y[i] * y[i];
                    double hmin = std::sqrt(rho2) / tana;
                    if (hmin <= 1.0) {
                        if (sign > 0)
                            out.push({hmin, 1.0});
                        else
                            out.push({-1.0, -hmin});
                    }
                } else {
                    double h = sign * y[ax_idx];
                    if (h < 0.0 || h > 1.0) return;
                    double rest = 0.0;
                    for (int i = 0; i < d; ++i)
                        if (i != ax_idx && i != axis) rest += y[i] * y[i];
                    double w = h * h * tana * tana - rest;
                    if (w >= 0.0) {
                        double s = std::sqrt(w);
                        out.push({-s, s});
                    }
                }
            } else if constexpr (std::is_same_v<S, CuspEpigraph>) {
                for (int i = 0; i < d - 1; ++i)
                    if (i != axis && (y[i] < -1.0 || y[i] > 1.0)) return;
                if (axis != d - 1 && (y[d - 1] < 0.0 || y[d - 1] > 1.0)) return;
                if (axis == d - 1) {
                    out.push({std::pow(std::abs(y[0]), shape.beta), 1.0});
                } else if (axis == 0) {
                    if (y[d - 1] < 0.0) return;
                    double s = std::min(1.0, std::pow(y[d - 1], 1.0 / shape.beta));
                    out.push({-s, s});
                } else {
                    if (y[d - 1] < std::pow(std::abs(y[0]), shape.beta)) return;
                    out.push({-1.0, 1.0});
                }
            } else {
                const Epigraph& e = shape;
                for (int i = 0; i < d - 1; ++i)
                    if (i != axis && (y[i] < e.lo[i] || y[i] > e.hi[i])) return;
                if (axis == d - 1) {
                    double g = e.gamma(y.head(d - 1));
                    out.push({std::max(g, e.lo[d - 1]), e.hi[d - 1]});
                }
            }
        },
        domain.shape());
    return out;
}

int preferred_section_axis(const Domain& domain, const Vec& x) {
    const int d = domain.dim();
    return std::visit(
        [&](const auto& shape) -> int {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Ball>) {
                (void)shape;
                int idx = d - 1;
                double m = x.cwiseAbs().maxCoeff(&idx);
                return m > 0.0 ? idx : d - 1;
            } else if constexpr (std::is_same_v<S, Box>) {
                int best = d - 1;
                double bd = kInf;
                for (int i = 0; i < d; ++i) {
                    double dist = std::min(x[i], shape.lengths[i] - x[i]);
                    if (dist < bd) {
                        bd = dist;
                        best = i;
                    }
                }
                return best;
            } else if constexpr (std::is_same_v<S, OrthantModel>) {
                (void)shape;
                return 0;
            } else if constexpr (std::is_same_v<S, Cone>) {
                int idx;
                shape.axis.cwiseAbs().maxCoeff(&idx);
                return idx;
            } else {
                return d - 1;
            }
        },
        domain.shape());
}

void bounding_box(const Domain& domain, Vec& lo, Vec& hi) {
    const int d = domain.dim();
    lo.resize(d);
    hi.resize(d);
    std::visit(
        [&](const auto& shape) {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Ball>) {
                lo.setConstant(-shape.radius);
                hi.setConstant(shape.radius);
            } else if constexpr (std::is_same_v<S, Box>) {
                lo.setZero();
                hi = shape.lengths;
            } else if constexpr (std::is_same_v<S, OrthantModel>) {
                for (int i = 0; i < d; ++i) lo[i] = i < shape.depth ? 0.0 : -1.0;
                hi.setOnes();
            } else if constexpr (std::is_same_v<S, Cone>) {
                double reach = 1.0 / std::cos(shape.half_angle);
                lo.setConstant(-reach);
                hi.setConstant(reach);
                int idx;
                double m = shape.axis.cwiseAbs().maxCoeff(&idx);
                if (m >= 1.0 - 1e-14) {
                    double tana = std::tan(shape.half_angle);
                    lo.setConstant(-tana);
                    hi.setConstant(tana);
                    if (shape.axis[idx] > 0) {
                        lo[idx] = 0.0;
                        hi[idx] = 1.0;
                    } else {
                        lo[idx] = -1.0;
                        hi[idx] = 0.0;
                    }
                }
            } else if constexpr (std::is_same_v<S, CuspEpigraph>) {
                lo.setConstant(-1.0);
                hi.setConstant(1.0);
                lo[d - 1] = 0.0;
            } else {
                lo = shape.lo;
                hi = shape.hi;
            }
        },
        domain.shape());
}

}  // namespace kinklap
