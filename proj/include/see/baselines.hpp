#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "see/matrix.hpp"
#include "see/tensor.hpp"

namespace see {

// ---- low-rank matrix factorization ----

/// Parameters of a rank-k factorization of a V x d table: (V + d) * k.
std::uint64_t lrmf_params(std::uint64_t vocab, std::uint64_t dim, std::uint64_t k);

/// Largest k with vocab*dim / ((vocab+dim)*k) >= target_ratio; throws when
/// even k = 1 misses the target.
std::uint64_t lrmf_rank_for_ratio(std::uint64_t vocab, std::uint64_t dim,
                                  double target_ratio);

/// U (V x k) times W (k x d).
DenseMatrix lrmf_reconstruct(const DenseMatrix& u, const DenseMatrix& w);

// ---- tensor-train decomposition of the embedding matrix ----

/// Embedding-matrix TT with paired row/col factorizations: core k has shape
/// (ranks[k], row_dims[k], col_dims[k], ranks[k+1]); prod(row_dims) = V,
/// prod(col_dims) = d, ranks.front() == ranks.back() == 1.
struct TtSpec {
    std::vector<int> row_dims;
    std::vector<int> col_dims;
    std::vector<int> ranks;

    std::size_t cores() const { return row_dims.size(); }
    void validate() const;
    std::uint64_t rows() const;
    std::uint64_t cols() const;
};

/// Sum over cores of ranks[k] * row_dims[k] * col_dims[k] * ranks[k+1].
std::uint64_t tt_params(const TtSpec& spec);

/// Cores as flat row-major blocks, one per core.
using TtCores = std::vector<std::vector<double>>;

TtCores tt_random_cores(const TtSpec& spec, std::uint64_t seed);

/// Expands the TT representation into the full V x d matrix by chained
/// contraction over the rank indices, left to right.
DenseMatrix tt_reconstruct(const TtSpec& spec, const TtCores& cores);

/// Factors n into `parts` integer factors minimizing the spread, for TT
/// shape suggestions (exact divisors only).
std::vector<int> near_balanced_factors(std::uint64_t n, int parts);

// ---- word2ket-style per-word factors ----

/// Per-word factor storage with no vocabulary sharing: V * r * o * q.
std::uint64_t word2ket_params(std::uint64_t vocab, int r, int o, int q);

/// Largest r with ratio >= target at the given order (q = factor_dim(d, o));
/// nullopt when even r = 1 misses the target.
std::optional<int> word2ket_rank_for_ratio(std::uint64_t vocab, int dim, int o,
                                           double target_ratio);

/// One word's embedding from its r * o factor vectors (laid out
/// [rank][factor][coord]), truncated to d.
Vec word2ket_row(ConstSlice factors, int r, int o, int q, int d);

// ---- morpheme tensor embeddings ----

/// Shared-morpheme factor storage: morph_vocab * r * q * copies. The count
/// grows linearly in r (unlike the sememe grid construction); o only shapes
/// the reconstruction.
std::uint64_t morphte_params(std::uint64_t morph_vocab, int r, int o, int q,
                             int copies = 1);

/// One word's embedding from shared morpheme factors: sum over rank j of
/// the chain of store rows for the word's o morphemes, truncated to d.
/// `store` is laid out [morph_vocab][r][q].
Vec morphte_row(ConstSlice store, std::uint64_t morph_vocab,
                const std::vector<std::uint32_t>& morph_ids, int r, int q, int d);

}  // namespace see
