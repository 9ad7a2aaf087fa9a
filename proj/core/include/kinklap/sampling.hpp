//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <string>

#include "kinklap/fields.hpp"
#include "kinklap/geometry.hpp"

namespace kinklap {

/// Seeded i.i.d. draws from a density on a domain. Regeneration from
/// (seed, n, domain, density) is bitwise identical for any thread count:
/// point i is produced by the counter-based stream keyed on (seed, i).
struct SampleSet {
    PointMatrix points;  // n x d, row major
    std::uint64_t seed = 0;
    std::string domain_id;
    std::string density_id;
    bool domain_convex = false;

    std::int64_t n() const { return points.rows(); }
    int dim() const { return static_cast<int>(points.cols()); }
};

/// Uniform draws: per-axis uniforms on boxes, Gaussian direction times
/// radius U^{1/d} on balls, rejection from the bounding box elsewhere.
/// Throws when the analytic acceptance rate is below 1e-4.
SampleSet sample_uniform(const Domain& domain, std::int64_t n, std::uint64_t seed);

/// Accept/reject draws from `density` against uniform proposals with a
/// constant envelope >= sup p (spot-checked on 1e5 probes).
SampleSet rejection_sample(const Domain& domain, const DensityField& density, std::int64_t n,
                           std::uint64_t seed, double envelope);

/// CSV with header x1..xd.
void save_csv(const SampleSet& s, const std::string& path);
SampleSet load_csv(const std::string& path);

/// Flat little-endian binary: magic "KLSS", u32 version, u64 n, u32 d,
/// f64 row-major coordinates.
void save_binary(const SampleSet& s, const std::string& path);
SampleSet load_binary(const std::string& path);

}  // namespace kinklap
