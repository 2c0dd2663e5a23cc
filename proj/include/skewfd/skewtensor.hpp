#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skewfd/lattice.hpp"
#include "skewfd/rational.hpp"
#include "skewfd/symmetry.hpp"

namespace skewfd {

using Key = std::vector<long>;  // site codes, one per tensor slot

/// Sparse tensor without any symmetry assumption (intermediate objects).
struct GeneralTensor {
    int rank = 2;
    Lattice lat;
    int m = 1;
    std::map<Key, Rat> entries;
};

/// Sparse completely antisymmetric tensor. Entries are stored once per
/// support set, key sorted ascending, permutation parity absorbed into the
/// coefficient. Keys with repeated sites are identically zero and never stored.
struct SkewTensor {
    int rank = 2;
    Lattice lat;
    int m = 1;
    std::map<Key, Rat> entries;  // canonical (sorted) keys only

    /// Adds value at an arbitrary-order key, canonicalizing with parity.
    void add(Key k, const Rat& v);
    /// Coefficient at an arbitrary-order key (0 if absent or repeated).
    Rat at(const Key& k) const;
};

struct CheckReport {
    bool pass = true;
    std::string detail;  // first violation, empty when pass
};

GeneralTensor delta_tensor(const Lattice& lat, int m, const MultiIndex& mi, const Rat& value);

/// Full skew symmetrization over S_rank and the group orbit (point ops and,
/// if enabled, all torus translations). Exact arithmetic.
SkewTensor symmetrize(const GeneralTensor& t, const SymmetryGroup& G);

CheckReport is_skew(const GeneralTensor& t);
CheckReport is_skew(const SkewTensor& t);  // structural, always passes
CheckReport is_g_invariant(const SkewTensor& t, const SymmetryGroup& G);

enum class Metric { graph, euclidean };
double bandwidth(const SkewTensor& t, Metric metric);

/// F_i = sum_{j,k,...} K_{i,j,k,...} v^1_j v^2_k ...  (grids indexed by site code)
template <class S>
std::vector<S> contract(const SkewTensor& t, const std::vector<std::vector<S>>& grads);

/// Contracts one slot against grad, producing a rank-(p) skew tensor.
SkewTensor contract_partial(const SkewTensor& t, const std::vector<Rat>& grad);

/// Symmetric state modulation q(x_i, x_j, u_i, u_j) of a rank-2 tensor.
struct SymmetricModulation {
    std::function<double(double, double, double, double)> q;
};

/// Rank-2 tensor whose entries may depend on the state u.
struct StateTensor2 {
    Lattice lat;
    std::vector<Key> support;  // keys (i, j) with potentially nonzero entries
    std::function<double(const std::vector<double>& u, long i, long j)> entry;

    std::vector<double> contract(const std::vector<double>& u,
                                 const std::vector<double>& v) const;
};

/// Wraps a constant rank-2 skew tensor with a symmetric modulation; checks
/// q's symmetry by spot tests. Skewness of the result is structural.
StateTensor2 modulate(const SkewTensor& t, const SymmetricModulation& mod);

/// max_j |sum_i dK_ij/du_i| estimated by central differences in u.
double divergence_residual(const StateTensor2& t, const std::vector<double>& u);

// extern template declarations
extern template std::vector<double> contract<double>(const SkewTensor&,
                                                     const std::vector<std::vector<double>>&);
extern template std::vector<Rat> contract<Rat>(const SkewTensor&,
                                               const std::vector<std::vector<Rat>>&);

} // namespace skewfd
