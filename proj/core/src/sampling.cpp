//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "kinklap/parallel.hpp"
#include "kinklap/rng.hpp"

namespace kinklap {

namespace {

void draw_in_box(CounterRng& rng, const Vec& lo, const Vec& hi, double* out, int d) {
    for (int i = 0; i < d; ++i) out[i] = lo[i] + (hi[i] - lo[i]) * rng.next_double();
}

/// One uniform draw from the domain using the stream rng.
void draw_uniform(const Domain& domain, CounterRng& rng, double* out) {
    const int d = domain.dim();
    if (const auto* b = std::get_if<Ball>(&domain.shape())) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                out[i] = rng.next_gaussian();
                norm2 += out[i] * out[i];
            }
        } while (norm2 == 0.0);
        double r = b->radius * std::pow(rng.next_double(), 1.0 / d) / std::sqrt(norm2);
        for (int i = 0; i < d; ++i) out[i] *= r;
        return;
    }
    if (const auto* bx = std::get_if<Box>(&domain.shape())) {
        for (int i = 0; i < d; ++i) out[i] = bx->lengths[i] * rng.next_double();
        return;
    }
    if (const auto* om = std::get_if<OrthantModel>(&domain.shape())) {
        for (int i = 0; i < d; ++i) {
            double lo = i < om->depth ? 0.0 : -1.0;
            out[i] = lo + (1.0 - lo) * rng.next_double();
        }
        return;
    }
    // Rejection from the bounding box.
    Vec lo, hi;
    bounding_box(domain, lo, hi);
    Eigen::Map<Vec> y(out, d);
    for (;;) {
        draw_in_box(rng, lo, hi, out, d);
        if (contains(domain, y)) return;
    }
}

double bounding_box_volume(const Domain& domain) {
    Vec lo, hi;
    bounding_box(domain, lo, hi);
    return (hi - lo).prod();
}

}  // namespace

SampleSet sample_uniform(const Domain& domain, std::int64_t n, std::uint64_t seed) {
    require(n >= 0, "sample_uniform: n must be nonnegative");
    const int d = domain.dim();
    const bool rejective = !std::holds_alternative<Ball>(domain.shape()) &&
                           !std::holds_alternative<Box>(domain.shape()) &&
                           !std::holds_alternative<OrthantModel>(domain.shape());
    if (rejective) {
        double accept = domain.volume() / bounding_box_volume(domain);
        require(accept >= 1e-4,
                "sample_uniform: rejection acceptance rate below 1e-4; use a tighter bounding box");
    }
    SampleSet s;
    s.points.resize(n, d);
    s.seed = seed;
    s.domain_id = domain.id();
    s.density_id = "uniform";
    s.domain_convex = domain.convex();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        CounterRng rng(seed, i);
        draw_uniform(domain, rng, s.points.row(static_cast<std::int64_t>(i)).data());
    });
    return s;
}

SampleSet rejection_sample(const Domain& domain, const DensityField& density, std::int64_t n,
                           std::uint64_t seed, double envelope) {
    require(n >= 0, "rejection_sample: n must be nonnegative");
    require(envelope > 0.0, "rejection_sample: envelope must be positive");
    const int d = domain.dim();

    // Spot-check the envelope on 1e5 uniform probes.
    {
        const std::uint64_t probe_seed = derive_seed(seed, 0x70726F62ull);
        Vec y(d);
        for (int i = 0; i < 100000; ++i) {
            CounterRng rng(probe_seed, static_cast<std::uint64_t>(i));
            draw_uniform(domain, rng, y.data());
            double p = density.value(y);
            require(p >= 0.0, "rejection_sample: density is negative at a probe point");
            require(p <= envelope * (1.0 + 1e-12),
                    "rejection_sample: envelope violated at a probe point");
        }
    }

    SampleSet s;
    s.points.resize(n, d);
    s.seed = seed;
    s.domain_id = domain.id();
    s.density_id = density.id();
    s.domain_convex = domain.convex();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        CounterRng rng(seed, i);
        double* row = s.points.row(static_cast<std::int64_t>(i)).data();
        Eigen::Map<Vec> y(row, d);
        for (;;) {
            draw_uniform(domain, rng, row);
            double u = rng.next_double();
            if (u * envelope <= density.value(y)) return;
        }
    });
    return s;
}

void save_csv(const SampleSet& s, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "save_csv: cannot open " + path);
    const int d = s.dim();
    for (int i = 0; i < d; ++i) out << (i ? ",x" : "x") << i + 1;
    out << "\n";
    char buf[64];
    for (std::int64_t r = 0; r < s.n(); ++r) {
        for (int i = 0; i < d; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", s.points(r, i));
            if (i) out << ',';
            out << buf;
        }
        out << "\n";
    }
}

SampleSet load_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "load_csv: cannot open " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "load_csv: empty file");
    int d = 1;
    for (char c : line)
        if (c == ',') ++d;
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* p = line.c_str();
        char* end = nullptr;
        for (int i = 0; i < d; ++i) {
            vals.push_back(std::strtod(p, &end));
            require(end != p, "load_csv: malformed row");
            p = (*end == ',') ? end + 1 : end;
        }
    }
    SampleSet s;
    const std::int64_t n = static_cast<std::int64_t>(vals.size()) / d;
    s.points.resize(n, d);
    for (std::int64_t r = 0; r < n; ++r)
        for (int i = 0; i < d; ++i) s.points(r, i) = vals[static_cast<std::size_t>(r) * d + i];
    return s;
}

void save_binary(const SampleSet& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "save_binary: cannot open " + path);
    const char magic[4] = {'K', 'L', 'S', 'S'};
    std::uint32_t version = 1;
    std::uint64_t n = static_cast<std::uint64_t>(s.n());
    std::uint32_t d = static_cast<std::uint32_t>(s.dim());
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&d), 4);
    out.write(reinterpret_cast<const char*>(s.points.data()),
              static_cast<std::streamsize>(n * d * sizeof(double)));
}

SampleSet load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "load_binary: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, d = 0;
    std::uint64_t n = 0;
    in.read(magic, 4);
    require(in.good() && std::memcmp(magic, "KLSS", 4) == 0, "load_binary: bad magic");
    in.read(reinterpret_cast<char*>(&version), 4);
    require(version == 1, "load_binary: unsupported version");
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&d), 4);
    SampleSet s;
    s.points.resize(static_cast<std::int64_t>(n), static_cast<int>(d));
    in.read(reinterpret_cast<char*>(s.points.data()),
            static_cast<std::streamsize>(n * d * sizeof(double)));
    require(in.good(), "load_binary: truncated file");
    return s;
}

}  // namespace kinklap
