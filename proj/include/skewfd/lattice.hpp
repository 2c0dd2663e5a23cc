#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewfd {

enum class LatticeKind { line1d, square2d, triangular2d, cubic3d, fcc3d };

std::string kind_name(LatticeKind k);
LatticeKind kind_from_name(const std::string& s);

using IVec = std::vector<int>;
using DVec = std::vector<double>;

/// Structured periodic grid. Indices live in Z^d modulo the extents;
/// fcc3d restricts to sites with even coordinate sum (the red points of a
/// red-black coloring of the cubic grid).
struct Lattice {
    LatticeKind kind = LatticeKind::line1d;
    int d = 1;
    IVec extent;                  // per dimension
    std::vector<bool> periodic;   // per dimension
    double h = 1.0;

    static Lattice line1d(int n, double h = 1.0);
    static Lattice square2d(int n, double h = 1.0);
    static Lattice triangular2d(int n, double h = 1.0);
    static Lattice cubic3d(int n, double h = 1.0);
    static Lattice fcc3d(int n, double h = 1.0);  // n must be even to keep the coloring periodic

    /// Wraps periodic dimensions; throws on out-of-range non-periodic index.
    IVec wrap(IVec l) const;
    bool on_lattice(const IVec& l) const;  // fcc parity constraint

    DVec coords(const IVec& l) const;

    /// Nearest-neighbor offsets defining the adjacency graph.
    std::vector<IVec> neighbor_offsets() const;

    int graph_distance(const IVec& a, const IVec& b) const;      // BFS, minimal wrap
    double euclidean_distance(const IVec& a, const IVec& b) const;  // minimal wrap image

    /// Linear site code; enumerates the full box, fcc skips odd-parity sites.
    long site_code(const IVec& l, int alpha = 0, int m = 1) const;
    IVec site_from_code(long code, int m = 1, int* alpha = nullptr) const;
    std::vector<IVec> all_sites() const;  // valid lattice sites only
    long box_size() const;
};

/// One lattice site plus a component index in {0..m-1}.
struct SiteIndex {
    IVec l;
    int alpha = 0;
};

} // namespace skewfd
