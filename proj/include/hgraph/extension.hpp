#pragma once

// Codimension-one extensions: V is a line, identified with R through the
// coefficient along its single frame vector.

#include "hgraph/diff.hpp"
#include "hgraph/function.hpp"
#include "hgraph/graph.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hgraph {

/// Upper boundary of the positive cone C_beta^+(vertex):
/// gamma(w) = c + (1/beta) ||c^{-1} u^{-1} w c|| for vertex = u . c.
struct ConeBoundaryFn {
    Splitting splitting;
    Point vertex;
    double beta = 1.0;

    Point u;         ///< W-component of the vertex
    double c = 0.0;  ///< V-coordinate of the vertex

    ConeBoundaryFn(Splitting s, Point vertex, double beta);
    /// Vertex given by its W coordinates and V value; exact at the apex.
    static ConeBoundaryFn over(Splitting s, std::span<const double> w, double c, double beta);

    double upper(const Metric& metric, std::span<const double> w) const;
    /// Mirrored lower boundary c - (1/beta) ||...||.
    double lower(const Metric& metric, std::span<const double> w) const;
};

double cone_boundary(const ConeBoundaryFn& gf, const Metric& metric, std::span<const double> w);

class LipschitzViolation : public std::runtime_error {
public:
    LipschitzViolation(std::size_t from, std::size_t to, double ratio, double declared);

    std::size_t from;
    std::size_t to;
    double ratio;
};

struct ExtensionResult {
    SampledFunction upper;  ///< eta
    SampledFunction lower;  ///< psi
    std::vector<std::uint8_t> subset;
    std::vector<std::uint8_t> equality_set;  ///< nodes where psi = phi = eta to 1e-12
    LipschitzResult subset_lip;
    LipschitzResult upper_lip;
    LipschitzResult lower_lip;
    double declared_L = 0.0;
};

/// eta(w) = min_u (phi(u) + L ||(u . phi(u))^{-1} w||_W-part), psi the mirrored max,
/// over u in E. Throws LipschitzViolation when phi on E is not L-Lipschitz.
ExtensionResult mcshane_extend(const SampledFunction& f, std::span<const std::uint8_t> subset, double L,
                               const Metric& metric, ScanOptions options = {});

/// Envelopes over explicit vertices, for evaluation at arbitrary W points.
double upper_envelope(const Splitting& s, const Metric& metric, std::span<const Point> vertices, double L,
                      std::span<const double> w);
double lower_envelope(const Splitting& s, const Metric& metric, std::span<const Point> vertices, double L,
                      std::span<const double> w);

struct SandwichRecord {
    DiffEstimate lower, middle, upper;
    double bracket_gap = 0.0;   ///< ||M_psi - M_eta|| (Frobenius)
    double band = 0.0;          ///< final residual of psi + final residual of eta
    double middle_offset = 0.0; ///< distance of M_phi from the segment [M_psi, M_eta]
    bool bracket_ok = false;    ///< bracket_gap < 2 band (or both fits exact)
    bool middle_in_band = false;
    bool violation = true;
};

/// Requires psi <= phi <= eta on common active nodes and equality at wbar.
SandwichRecord sandwich_harness(const SampledFunction& psi, const SampledFunction& phi, const SampledFunction& eta,
                                const Metric& metric, std::size_t base_node, const DiffOptions& options = {});

}  // namespace hgraph
