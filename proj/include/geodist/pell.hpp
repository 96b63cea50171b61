#pragma once

#include "geodist/bqf.hpp"

#include <array>

namespace geodist {

// Minimal positive solution of t^2 - d u^2 = 4; encodes the fundamental
// norm-one unit (t + u sqrt(d)) / 2 of O_d.
struct PellSolution {
    BigInt t, u;
};

struct RegulatorData {
    double regulator = 0.0; // log((t + u sqrt d) / 2), natural log
    double period = 0.0;    // 2 * regulator; closing time of the flow
    bool has_norm_minus_one_unit = false;
};

// Fundamental Pell solution via one traversal of the principal rho-cycle.
PellSolution fundamental_pell(const Discriminant& d);

RegulatorData regulator_from(const PellSolution& p, const Discriminant& d);
RegulatorData regulator(const Discriminant& d);

// Integer automorph of f attached to the Pell solution:
// [[(t - b u)/2, -c u], [a u, (t + b u)/2]], det 1, trace t.
std::array<BigInt, 4> automorph(const QuadForm& f, const PellSolution& p);

// The per-step matrices [[0,-1],[1,m_i]] whose product over one cycle is the
// automorph of the cycle's first form. m_i = (b_i + b_{i+1}) / (2 c_i).
std::vector<BigInt> rho_step_coefficients(const ReductionCycle& cycle);

} // namespace geodist
