#include "see/embedding.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "see/io.hpp"

namespace see {

int factor_dim(int d, int o) {
    if (d < 1 || o < 1) throw std::invalid_argument("factor_dim: d and o must be >= 1");
    int q = 1;
    while (true) {
        // q^o computed in integers; overflow cannot happen before exceeding d
        std::uint64_t p = 1;
        for (int k = 0; k < o && p < static_cast<std::uint64_t>(d); ++k) p *= q;
        if (p >= static_cast<std::uint64_t>(d)) return q;
        ++q;
    }
}

void SeeConfig::validate() const {
    if (d < 1) throw std::invalid_argument("SeeConfig: d must be >= 1");
    if (o < 1) throw std::invalid_argument("SeeConfig: o must be >= 1");
    if (r < 1) throw std::invalid_argument("SeeConfig: r must be >= 1");
    if (m < 1) throw std::invalid_argument("SeeConfig: m must be >= 1");
    if (unit_count < 2) throw std::invalid_argument("SeeConfig: unit_count must include the two reserved units");
    if (target_var < 0.0) throw std::invalid_argument("SeeConfig: target_var must be >= 0");
}

FactorStore::FactorStore(std::uint32_t unit_count, int m, int q, std::uint64_t seed)
    : unit_count_(unit_count), m_(m), q_(q), seed_(seed),
      params_(static_cast<std::size_t>(unit_count) * m * q, 0.0) {
    if (unit_count < 2 || m < 1 || q < 1)
        throw std::invalid_argument("FactorStore: bad shape");
}

std::size_t FactorStore::offset(std::uint32_t unit, int copy) const {
    if (unit >= unit_count_ || copy < 0 || copy >= m_)
        throw std::out_of_range("FactorStore: unit/copy out of range");
    return (static_cast<std::size_t>(unit) * m_ + copy) * q_;
}

ConstSlice FactorStore::row(std::uint32_t unit, int copy) const {
    return {params_.data() + offset(unit, copy), static_cast<std::size_t>(q_)};
}

std::span<double> FactorStore::row_mut(std::uint32_t unit, int copy) {
    if (unit == UnitVocab::kZeroId)
        throw std::logic_error("FactorStore: the zero unit is frozen");
    return {params_.data() + offset(unit, copy), static_cast<std::size_t>(q_)};
}

FactorStore init_factors(const SeeConfig& cfg) {
    cfg.validate();
    FactorStore store(cfg.unit_count, cfg.m, cfg.q(), cfg.seed);

    const double s = std::pow(cfg.resolved_target_var() / (static_cast<double>(cfg.r) * cfg.m),
                              1.0 / (2.0 * cfg.o));
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, s);

    for (std::uint32_t u = 0; u < cfg.unit_count; ++u) {
        if (u == UnitVocab::kZeroId) continue;  // frozen at zero
        for (int i = 0; i < cfg.m; ++i)
            for (double& v : store.row_mut(u, i)) v = normal(rng);
    }
    return store;
}

namespace {

std::uint64_t pow_u64(std::uint64_t base, int exp) {
    std::uint64_t p = 1;
    for (int k = 0; k < exp; ++k) p *= base;
    return p;
}

void check_shapes(const IndexGrid& grid, const FactorStore& store, const SeeConfig& cfg) {
    if (grid.rank != cfg.r || grid.order != cfg.o)
        throw std::invalid_argument("grid shape does not match config (r=" +
                                    std::to_string(grid.rank) + ", o=" +
                                    std::to_string(grid.order) + ")");
    if (cfg.r < 2) throw std::invalid_argument("reconstruction needs r >= 2");
    if (store.unit_count() != cfg.unit_count || store.copies() != cfg.m ||
        store.factor_dim() != cfg.q())
        throw std::invalid_argument("factor store shape does not match config");
    for (std::uint32_t id : grid.ids)
        if (id >= cfg.unit_count)
            throw std::invalid_argument("grid references unit id " + std::to_string(id) +
                                        " outside the vocabulary");
}

}  // namespace

Vec reconstruct_row(const IndexGrid& grid, const FactorStore& store, const SeeConfig& cfg) {
    cfg.validate();
    check_shapes(grid, store, cfg);

    const int q = cfg.q();
    const std::size_t full = pow_u64(static_cast<std::uint64_t>(q), cfg.o);
    Vec acc(full, 0.0);
    std::vector<ConstSlice> factors(cfg.o);

    for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.r; ++j) {
            for (int k = 0; k < cfg.o; ++k) factors[k] = store.row(grid.at(j, k), i);
            const Vec chain = kron_chain(factors);
            for (std::size_t p = 0; p < full; ++p) acc[p] += chain[p];
        }
    }
    acc.resize(static_cast<std::size_t>(cfg.d));
    return acc;
}

GradMap reconstruct_backward(const IndexGrid& grid, const FactorStore& store,
                             const SeeConfig& cfg, ConstSlice upstream) {
    cfg.validate();
    check_shapes(grid, store, cfg);
    if (upstream.size() != static_cast<std::size_t>(cfg.d))
        throw std::invalid_argument("reconstruct_backward: upstream length != d");

    const int q = cfg.q();
    const std::size_t full = pow_u64(static_cast<std::uint64_t>(q), cfg.o);
    Vec padded(full, 0.0);
    std::copy(upstream.begin(), upstream.end(), padded.begin());

    GradMap grads;
    std::vector<ConstSlice> factors(cfg.o);
    for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.r; ++j) {
            for (int k = 0; k < cfg.o; ++k) factors[k] = store.row(grid.at(j, k), i);
            const auto chain_grads = kron_chain_backward(factors, padded);
            for (int k = 0; k < cfg.o; ++k) {
                const std::uint32_t id = grid.at(j, k);
                if (id == UnitVocab::kZeroId) continue;
                auto [it, inserted] = grads.try_emplace({id, i}, Vec(q, 0.0));
                for (int c = 0; c < q; ++c) it->second[c] += chain_grads[k][c];
            }
        }
    }
    return grads;
}

DenseMatrix materialize(const GridTable& table, const FactorStore& store,
                        const SeeConfig& cfg) {
    cfg.validate();
    if (table.rank != cfg.r || table.order != cfg.o)
        throw std::invalid_argument("materialize: table shape does not match config");
    if (table.vocab.size() != 0 && table.vocab.size() != cfg.unit_count)
        throw std::invalid_argument("materialize: table vocabulary size does not match config");

    DenseMatrix out(table.grids.size(), static_cast<std::size_t>(cfg.d));
    for (std::size_t w = 0; w < table.grids.size(); ++w) {
        const Vec row = reconstruct_row(table.grids[w], store, cfg);
        std::copy(row.begin(), row.end(), out.row(w).begin());
    }
    return out;
}

std::uint64_t param_count(const SeeConfig& cfg) {
    cfg.validate();
    return static_cast<std::uint64_t>(cfg.unit_count - 1) *
           static_cast<std::uint64_t>(cfg.q()) * static_cast<std::uint64_t>(cfg.m);
}

int solve_m_for_ratio(const SeeConfig& cfg, std::uint64_t original_params,
                      double target_ratio) {
    if (target_ratio <= 1.0)
        throw std::invalid_argument("solve_m_for_ratio: target ratio must be > 1");
    SeeConfig probe = cfg;
    probe.m = 1;
    probe.validate();

    const auto ratio_at = [&](int m) {
        probe.m = m;
        return static_cast<double>(original_params) / static_cast<double>(param_count(probe));
    };

    if (ratio_at(1) < target_ratio)
        throw std::runtime_error("solve_m_for_ratio: target " + std::to_string(target_ratio) +
                                 "x unreachable; max achievable is " +
                                 std::to_string(ratio_at(1)) + "x at m=1");

    int m = static_cast<int>(static_cast<double>(original_params) /
                             (target_ratio * static_cast<double>(param_count(probe))));
    if (m < 1) m = 1;
    while (ratio_at(m) < target_ratio) --m;
    while (ratio_at(m + 1) >= target_ratio) ++m;
    return m;
}

namespace {
constexpr char kStoreMagic[5] = "SEEF";
constexpr std::uint32_t kStoreVersion = 1;
}  // namespace

void write_factor_store(std::ostream& os, const FactorStore& store) {
    io::write_magic(os, kStoreMagic);
    io::write_le<std::uint32_t>(os, kStoreVersion);
    io::write_le<std::uint64_t>(os, store.unit_count());
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(store.copies()));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(store.factor_dim()));
    io::write_le<std::uint64_t>(os, store.seed());
    for (double v : store.raw()) io::write_f64(os, v);
}

FactorStore read_factor_store(std::istream& is) {
    io::expect_magic(is, kStoreMagic, "factor store file");
    const auto version = io::read_le<std::uint32_t>(is);
    if (version != kStoreVersion)
        throw std::runtime_error("factor store file: unsupported version " +
                                 std::to_string(version));
    const auto unit_count = static_cast<std::uint32_t>(io::read_le<std::uint64_t>(is));
    const auto m = static_cast<int>(io::read_le<std::uint32_t>(is));
    const auto q = static_cast<int>(io::read_le<std::uint32_t>(is));
    const auto seed = io::read_le<std::uint64_t>(is);
    FactorStore store(unit_count, m, q, seed);
    for (double& v : store.raw_mut()) v = io::read_f64(is);
    return store;
}

void write_factor_store_file(const std::filesystem::path& path, const FactorStore& store) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_factor_store(os, store);
}

FactorStore read_factor_store_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return read_factor_store(is);
}

}  // namespace see
