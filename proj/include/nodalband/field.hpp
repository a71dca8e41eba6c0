#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nodalband/kernel.hpp"

namespace nodalband {

using Vec3 = std::array<double, 3>;

// Geodesic mesh from recursive subdivision of the icosahedron.
struct Mesh {
    int level = 0;
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> weights;  // spherical Voronoi area per vertex, summing to 4 pi
    double max_edge = 0.0;        // longest edge as a great-circle angle
};

Mesh build_mesh(int level);

// Longest admissible edge for a window: one wavelength 2 pi / n split into q pieces.
double max_admissible_edge(const BandWindow& win, double q = 8.0);

// Smallest subdivision level meeting max_admissible_edge.
int min_mesh_level(const BandWindow& win, double q = 8.0);

// Throws ConstructionError naming the minimum level if the mesh is too coarse.
void check_mesh(const Mesh& mesh, const BandWindow& win, double q = 8.0);

// Real spherical-harmonic coefficients of one realization; index of (l, m) is
// offset(l) + l + m with offset(L0) = 0.
struct FieldSample {
    BandWindow window;
    std::vector<double> coeffs;
    std::uint64_t seed = 0;
    std::size_t index(int l, int m) const;
};

// Seed of the i-th sample of a run.
std::uint64_t sample_seed(std::uint64_t run_seed, std::uint64_t i);

FieldSample sample_field(const BandWindow& win, std::uint64_t seed);

// Field values at unit vectors (rejected if | |x| - 1 | > 1e-12).
std::vector<double> evaluate_field(const FieldSample& sample, const std::vector<Vec3>& points);

// Several samples of one window at once; out[k][p] is sample k at point p.
std::vector<std::vector<double>> evaluate_fields(const std::vector<FieldSample>& samples,
                                                 const std::vector<Vec3>& points);

// Length of the zero set of the piecewise linear interpolant on the mesh, measured
// along great circles.
double nodal_length(const std::vector<double>& values, const Mesh& mesh);

struct NodalStats {
    long n_samples = 0;
    double mean_length = 0.0;
    double var_length = 0.0;
    double stderr_mean = 0.0;
    double stderr_var = 0.0;
    long mesh_resolution = 0;
    int mesh_level = 0;
    std::uint64_t seed = 0;
    std::string discretization_note;
    std::vector<double> lengths;  // per sample, in sample order
};

NodalStats mc_nodal_stats(const BandWindow& win, long n_samples, int level, std::uint64_t seed, int threads = 1,
                          double q = 8.0);

// Rows "seed,length" for each sample.
std::string lengths_csv(const NodalStats& stats);

} // namespace nodalband
