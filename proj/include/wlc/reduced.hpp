#pragma once

#include "wlc/envelope.hpp"
#include "wlc/unit_loop.hpp"

#include <cstddef>
#include <vector>

namespace wlc {

// Centre-of-mass integrals of the proper-time integral for one unit loop,
// done in closed form for the preset scenes at a = 1. Every function returns
// J with E = -J / (32 pi^2) in units of a (forces: F = -J / (32 pi^2)).
//
// Cross-section coordinates follow the loop rows: row 0 is z (the plate
// normal), row 1 is x.

/// Parallel plates at z = 0 and z = 1: J = R^4 / 6 with R the z-extent.
double reduced_parallel(const Loop& loop);

/// Height profile W(h) = Zmax(h) - zmin over the vertical lines x = h, where
/// Zmax is the upper crossing envelope. Piece-wise linear, possibly with jumps.
CrossingEnvelope<double> height_profile(const Loop& loop);

/// Plate z = 0 and vertical half-plate x = 0, z >= 1: J = (1/3) int W^3 dh.
double reduced_perpendicular(const Loop& loop);

/// int W(h)^3 dh over the profile (exact per linear piece).
double profile_cube_integral(const CrossingEnvelope<double>& profile, double zmin);

/// Plate z = 0 and half-plate z = 1, x <= 0, minus the same loop's
/// parallel-plate energy over x <= 0:
///   J = int (-Xmin(h)) (h - zmin)^2 dh,
/// Xmin the lower crossing envelope over the lines z = h.
double reduced_one_semi_infinite_edge(const Loop& loop);

/// Half-plates z = 0 and z = 1, both x <= 0, minus the same loop's
/// parallel-plate energy over x <= 0:
///   J = int int_{h < h'} 2 (h' - h) (-max(Xmin(h), Xmin(h'))) dh dh'.
/// Evaluated on `cells` midpoint cells in O(cells log cells).
double reduced_two_semi_infinite_edge(const Loop& loop, std::size_t cells = 4096);

/// Same double integral by direct O(cells^2) summation (reference).
double reduced_two_semi_infinite_edge_direct(const Loop& loop, std::size_t cells);

/// Plate z = 0 and `teeth` vertical half-plates x = k d, z >= 1. Returns the
/// force functional G with F/L = -G / (32 pi^2):
///   G = int 2 u^2 m(u) du,  m(u) = |union_k (S(u) - k d u)|,
///   S(u) = {h : W(h) > u}.
/// teeth == 0 selects the infinite periodic comb; G is then per tooth.
/// Overlapping shifts only occur for u < (profile width) / d; that range
/// uses composite Gauss-Legendre with `panels` x 8 nodes, the rest is exact.
double reduced_comb_force(const Loop& loop, double spacing, int teeth, int panels = 32);

/// Superlevel set S(u) of the profile as sorted disjoint intervals.
std::vector<std::pair<double, double>> profile_superlevel(const CrossingEnvelope<double>& profile, double zmin,
                                                          double u);

/// m(u) for the comb; teeth == 0 gives the periodic measure per period.
double comb_cover_measure(const std::vector<std::pair<double, double>>& superlevel, double shift, int teeth);

}  // namespace wlc
