#include "see/baselines.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "see/embedding.hpp"

namespace see {

std::uint64_t lrmf_params(std::uint64_t vocab, std::uint64_t dim, std::uint64_t k) {
    if (vocab == 0 || dim == 0) throw std::invalid_argument("lrmf_params: empty table");
    if (k < 1 || k > std::min(vocab, dim))
        throw std::invalid_argument("lrmf_params: k must be in [1, min(V, d)]");
    return (vocab + dim) * k;
}

std::uint64_t lrmf_rank_for_ratio(std::uint64_t vocab, std::uint64_t dim,
                                  double target_ratio) {
    if (target_ratio <= 1.0)
        throw std::invalid_argument("lrmf_rank_for_ratio: target ratio must be > 1");
    const double original = static_cast<double>(vocab) * static_cast<double>(dim);
    const auto ratio_at = [&](std::uint64_t k) {
        return original / static_cast<double>(lrmf_params(vocab, dim, k));
    };
    if (ratio_at(1) < target_ratio)
        throw std::runtime_error("lrmf_rank_for_ratio: target " +
                                 std::to_string(target_ratio) + "x unreachable; max is " +
                                 std::to_string(ratio_at(1)) + "x at k=1");
    auto k = static_cast<std::uint64_t>(
        original / (target_ratio * static_cast<double>(vocab + dim)));
    k = std::clamp<std::uint64_t>(k, 1, std::min(vocab, dim));
    while (ratio_at(k) < target_ratio) --k;
    while (k < std::min(vocab, dim) && ratio_at(k + 1) >= target_ratio) ++k;
    return k;
}

DenseMatrix lrmf_reconstruct(const DenseMatrix& u, const DenseMatrix& w) {
    if (u.cols != w.rows) throw std::invalid_argument("lrmf_reconstruct: inner dims differ");
    DenseMatrix out(u.rows, w.cols);
    for (std::size_t i = 0; i < u.rows; ++i)
        for (std::size_t k = 0; k < u.cols; ++k) {
            const double uik = u.at(i, k);
            for (std::size_t j = 0; j < w.cols; ++j) out.at(i, j) += uik * w.at(k, j);
        }
    return out;
}

void TtSpec::validate() const {
    const std::size_t n = row_dims.size();
    if (n == 0) throw std::invalid_argument("TtSpec: no cores");
    if (col_dims.size() != n) throw std::invalid_argument("TtSpec: row/col core count differs");
    if (ranks.size() != n + 1) throw std::invalid_argument("TtSpec: need cores+1 ranks");
    if (ranks.front() != 1 || ranks.back() != 1)
        throw std::invalid_argument("TtSpec: boundary ranks must be 1");
    for (int v : row_dims)
        if (v < 1) throw std::invalid_argument("TtSpec: row dims must be positive");
    for (int v : col_dims)
        if (v < 1) throw std::invalid_argument("TtSpec: col dims must be positive");
    for (int v : ranks)
        if (v < 1) throw std::invalid_argument("TtSpec: ranks must be positive");
}

std::uint64_t TtSpec::rows() const {
    std::uint64_t p = 1;
    for (int v : row_dims) p *= static_cast<std::uint64_t>(v);
    return p;
}

std::uint64_t TtSpec::cols() const {
    std::uint64_t p = 1;
    for (int v : col_dims) p *= static_cast<std::uint64_t>(v);
    return p;
}

std::uint64_t tt_params(const TtSpec& spec) {
    spec.validate();
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < spec.cores(); ++k)
        total += static_cast<std::uint64_t>(spec.ranks[k]) * spec.row_dims[k] *
                 spec.col_dims[k] * spec.ranks[k + 1];
    return total;
}

TtCores tt_random_cores(const TtSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    TtCores cores;
    for (std::size_t k = 0; k < spec.cores(); ++k) {
        std::vector<double> core(static_cast<std::size_t>(spec.ranks[k]) * spec.row_dims[k] *
                                 spec.col_dims[k] * spec.ranks[k + 1]);
        for (double& v : core) v = normal(rng);
        cores.push_back(std::move(core));
    }
    return cores;
}

DenseMatrix tt_reconstruct(const TtSpec& spec, const TtCores& cores) {
    spec.validate();
    if (cores.size() != spec.cores())
        throw std::invalid_argument("tt_reconstruct: core count mismatch");
    for (std::size_t k = 0; k < cores.size(); ++k) {
        const std::size_t want = static_cast<std::size_t>(spec.ranks[k]) * spec.row_dims[k] *
                                 spec.col_dims[k] * spec.ranks[k + 1];
        if (cores[k].size() != want)
            throw std::invalid_argument("tt_reconstruct: core " + std::to_string(k) +
                                        " has wrong size");
    }

    // acc[(i, j), a] over the processed prefix: i rows, j cols, a = ranks[k+1]
    std::vector<double> acc = cores[0];  // shape (row0, col0, r1) with leading rank 1
    std::uint64_t rows = spec.row_dims[0], cols = spec.col_dims[0];

    for (std::size_t k = 1; k < spec.cores(); ++k) {
        const std::uint64_t rk = spec.ranks[k], rk1 = spec.ranks[k + 1];
        const std::uint64_t nk = spec.row_dims[k], mk = spec.col_dims[k];
        std::vector<double> next(rows * nk * cols * mk * rk1, 0.0);
        for (std::uint64_t i = 0; i < rows; ++i)
            for (std::uint64_t j = 0; j < cols; ++j)
                for (std::uint64_t a = 0; a < rk; ++a) {
                    const double left = acc[(i * cols + j) * rk + a];
                    if (left == 0.0) continue;
                    for (std::uint64_t x = 0; x < nk; ++x)
                        for (std::uint64_t y = 0; y < mk; ++y)
                            for (std::uint64_t b = 0; b < rk1; ++b) {
                                const double right =
                                    cores[k][((a * nk + x) * mk + y) * rk1 + b];
                                // row index (i, x), col index (j, y)
                                next[(((i * nk + x) * cols + j) * mk + y) * rk1 + b] +=
                                    left * right;
                            }
                }
        acc = std::move(next);
        rows *= nk;
        cols *= mk;
    }

    DenseMatrix out(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j) out.at(i, j) = acc[(i * cols + j)];
    return out;
}

std::vector<int> near_balanced_factors(std::uint64_t n, int parts) {
    if (n == 0 || parts < 1) throw std::invalid_argument("near_balanced_factors: bad input");
    if (parts == 1) return {static_cast<int>(n)};

    std::vector<int> best;
    std::uint64_t best_spread = ~0ull;
    for (std::uint64_t f = 1; f * f <= n; ++f) {
        if (n % f != 0) continue;
        for (std::uint64_t first : {f, n / f}) {
            auto rest = near_balanced_factors(n / first, parts - 1);
            std::vector<int> cand{static_cast<int>(first)};
            cand.insert(cand.end(), rest.begin(), rest.end());
            std::sort(cand.begin(), cand.end());
            const std::uint64_t spread =
                static_cast<std::uint64_t>(cand.back()) - static_cast<std::uint64_t>(cand.front());
            if (spread < best_spread) {
                best_spread = spread;
                best = cand;
            }
        }
    }
    return best;
}

std::uint64_t word2ket_params(std::uint64_t vocab, int r, int o, int q) {
    if (vocab == 0 || r < 1 || o < 1 || q < 1)
        throw std::invalid_argument("word2ket_params: dims must be positive");
    return vocab * static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(o) *
           static_cast<std::uint64_t>(q);
}

std::optional<int> word2ket_rank_for_ratio(std::uint64_t vocab, int dim, int o,
                                           double target_ratio) {
    if (target_ratio <= 1.0)
        throw std::invalid_argument("word2ket_rank_for_ratio: target ratio must be > 1");
    const int q = factor_dim(dim, o);
    const double original = static_cast<double>(vocab) * dim;
    const auto ratio_at = [&](int r) {
        return original / static_cast<double>(word2ket_params(vocab, r, o, q));
    };
    if (ratio_at(1) < target_ratio) return std::nullopt;
    int r = static_cast<int>(dim / (target_ratio * o * q));
    if (r < 1) r = 1;
    while (ratio_at(r) < target_ratio) --r;
    while (ratio_at(r + 1) >= target_ratio) ++r;
    return r;
}

Vec word2ket_row(ConstSlice factors, int r, int o, int q, int d) {
    if (factors.size() != static_cast<std::size_t>(r) * o * q)
        throw std::invalid_argument("word2ket_row: factor block size mismatch");
    std::uint64_t full = 1;
    for (int k = 0; k < o; ++k) full *= static_cast<std::uint64_t>(q);
    if (static_cast<std::uint64_t>(d) > full)
        throw std::invalid_argument("word2ket_row: q^o < d");

    Vec acc(full, 0.0);
    std::vector<ConstSlice> chain(o);
    for (int j = 0; j < r; ++j) {
        for (int k = 0; k < o; ++k)
            chain[k] = factors.subspan((static_cast<std::size_t>(j) * o + k) * q, q);
        const Vec t = kron_chain(chain);
        for (std::size_t p = 0; p < full; ++p) acc[p] += t[p];
    }
    acc.resize(static_cast<std::size_t>(d));
    return acc;
}

std::uint64_t morphte_params(std::uint64_t morph_vocab, int r, int o, int q, int copies) {
    if (morph_vocab == 0 || r < 1 || o < 1 || q < 1 || copies < 1)
        throw std::invalid_argument("morphte_params: dims must be positive");
    return morph_vocab * static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(q) *
           static_cast<std::uint64_t>(copies);
}

Vec morphte_row(ConstSlice store, std::uint64_t morph_vocab,
                const std::vector<std::uint32_t>& morph_ids, int r, int q, int d) {
    if (store.size() != morph_vocab * static_cast<std::uint64_t>(r) * q)
        throw std::invalid_argument("morphte_row: store size mismatch");
    const int o = static_cast<int>(morph_ids.size());
    if (o < 1) throw std::invalid_argument("morphte_row: need at least one morpheme");
    for (std::uint32_t id : morph_ids)
        if (id >= morph_vocab) throw std::invalid_argument("morphte_row: morpheme id out of range");

    std::uint64_t full = 1;
    for (int k = 0; k < o; ++k) full *= static_cast<std::uint64_t>(q);
    if (static_cast<std::uint64_t>(d) > full)
        throw std::invalid_argument("morphte_row: q^o < d");

    Vec acc(full, 0.0);
    std::vector<ConstSlice> chain(o);
    for (int j = 0; j < r; ++j) {
        for (int k = 0; k < o; ++k)
            chain[k] = store.subspan((static_cast<std::size_t>(morph_ids[k]) * r + j) * q, q);
        const Vec t = kron_chain(chain);
        for (std::size_t p = 0; p < full; ++p) acc[p] += t[p];
    }
    acc.resize(static_cast<std::size_t>(d));
    return acc;
}

}  // namespace see
