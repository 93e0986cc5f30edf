#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "see/lexicon.hpp"
#include "see/matrix.hpp"
#include "see/tensor.hpp"

namespace see {

/// Smallest q with q^o >= d (integer-exact).
int factor_dim(int d, int o);

struct SeeConfig {
    int d = 0;                    // target embedding dimension
    int o = 0;                    // order: factors per Kronecker chain
    int r = 0;                    // rank: morpheme row + r-1 sense rows
    int m = 0;                    // copies: factor sets per unit
    std::uint32_t unit_count = 0; // |S| + |M| + 2 (pad + zero)
    std::uint64_t seed = 0;
    double target_var = 0.0;      // 0 selects the default 1/d

    int q() const { return factor_dim(d, o); }
    double resolved_target_var() const { return target_var > 0.0 ? target_var : 1.0 / d; }

    /// Throws std::invalid_argument when the shape is unusable. r == 1 is
    /// allowed here (parameter accounting sweeps over it); grid compilation
    /// and reconstruction need r >= 2.
    void validate() const;
};

/// The trainable parameter block: unit_count x m x q factor vectors laid out
/// row-major by (unit, copy, coordinate). The ZERO row stays identically
/// zero; mutating it throws.
class FactorStore {
public:
    FactorStore() = default;
    FactorStore(std::uint32_t unit_count, int m, int q, std::uint64_t seed);

    std::uint32_t unit_count() const { return unit_count_; }
    int copies() const { return m_; }
    int factor_dim() const { return q_; }
    std::uint64_t seed() const { return seed_; }

    ConstSlice row(std::uint32_t unit, int copy) const;
    std::span<double> row_mut(std::uint32_t unit, int copy);

    const std::vector<double>& raw() const { return params_; }
    std::vector<double>& raw_mut() { return params_; }  // caller keeps ZERO row zero
    std::size_t offset(std::uint32_t unit, int copy) const;

    bool operator==(const FactorStore&) const = default;

private:
    std::uint32_t unit_count_ = 0;
    int m_ = 0;
    int q_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> params_;
};

/// Sparse factor gradient: (unit id, copy) -> length-q vector. Repeated
/// unit ids accumulate additively; the ZERO row never appears.
using GradKey = std::pair<std::uint32_t, int>;
using GradMap = std::map<GradKey, Vec>;

/// Draws every trainable entry i.i.d. normal with std
/// (target_var / (r * m))^(1/(2o)), leaving the ZERO row frozen at zero.
/// Deterministic given cfg.seed.
FactorStore init_factors(const SeeConfig& cfg);

/// Reconstructs one embedding row:
///   e = sum_{i<m} sum_{j<r} kron_chain(store[grid[j][0]][i], ..., store[grid[j][o-1]][i])
/// accumulated copy-major, then truncated to the first d coordinates.
Vec reconstruct_row(const IndexGrid& grid, const FactorStore& store, const SeeConfig& cfg);

/// Backward of reconstruct_row: upstream (length d) is zero-padded to q^o
/// and pushed through every chain. Entries for the ZERO unit are dropped.
GradMap reconstruct_backward(const IndexGrid& grid, const FactorStore& store,
                             const SeeConfig& cfg, ConstSlice upstream);

/// Expands every grid into a dense |V| x d matrix so later lookups are plain
/// row reads.
DenseMatrix materialize(const GridTable& table, const FactorStore& store,
                        const SeeConfig& cfg);

/// Trainable parameter count: (unit_count - 1) * q * m. The frozen ZERO row
/// is excluded; the learned pad row is counted. Independent of r and |V|.
std::uint64_t param_count(const SeeConfig& cfg);

/// Largest m >= 1 with original_params / param_count(cfg with m) >=
/// target_ratio. Throws when even m = 1 misses the target, stating the max
/// achievable ratio.
int solve_m_for_ratio(const SeeConfig& cfg, std::uint64_t original_params,
                      double target_ratio);

// Versioned binary container ("SEEF"): header {unit_count, m, q, seed},
// then the raw parameter block. Bit-exact round trip.
void write_factor_store(std::ostream& os, const FactorStore& store);
FactorStore read_factor_store(std::istream& is);
void write_factor_store_file(const std::filesystem::path& path, const FactorStore& store);
FactorStore read_factor_store_file(const std::filesystem::path& path);

}  // namespace see
