#pragma once

#include <cstddef>
#include <random>

#include "lpdr/complex.hpp"

namespace lpdr {

/// Regular k-simplex with unit edges: vertex i at e_i / sqrt(2) in R^{k+1}, ids 0..k.
MetricComplex regular_simplex(int k);

/// Boundary of the regular unit k-simplex (k >= 1).
MetricComplex simplex_boundary(int k);

/// Cone over K: coordinates gain one axis, the apex gets the next free id and
/// sits one unit above the vertex barycenter.
MetricComplex cone(const MetricComplex& K);

/// Centre vertex 0 joined to a hexagon 1..6 of unit edges.
MetricComplex hexagonal_fan();

/// m x m block of regular unit triangles in the plane (2 m^2 triangles).
MetricComplex triangular_lattice(int m);

/// Boundary of the unit cube [0,1]^n for n in {1, 2}; for n = 2 each side is cut into `cuts` edges.
MetricComplex cube_boundary(int n, int cuts = 1);

/// Jittered Freudenthal grid in dimension `dim` (1..3); random top simplices are
/// added while the face-closed total stays within `max_simplices`.
MetricComplex random_complex(std::mt19937_64& rng, int dim, std::size_t max_simplices, double jitter = 0.15);

/// Vertex-degree bound after one barycentric subdivision of an n-dimensional
/// complex whose vertices have at most N edges.
std::size_t subdivision_degree_bound(int n, std::size_t N);

}  // namespace lpdr
