#include "see/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace see {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Validates the common-q invariant and returns q.
std::size_t chain_dim(std::span<const ConstSlice> factors) {
    require(!factors.empty(), "kron_chain: empty factor chain");
    const std::size_t q = factors[0].size();
    require(q >= 1, "kron_chain: factor of length 0");
    for (const auto& f : factors)
        require(f.size() == q, "kron_chain: factors must share one length");
    return q;
}

}  // namespace

Vec kron(ConstSlice x, ConstSlice y) {
    require(!x.empty() && !y.empty(), "kron: operands must be non-empty");
    Vec out(x.size() * y.size());
    std::size_t p = 0;
    for (double xa : x)
        for (double yb : y) out[p++] = xa * yb;
    return out;
}

Vec kron_chain(std::span<const ConstSlice> factors) {
    chain_dim(factors);
    Vec acc(factors[0].begin(), factors[0].end());
    for (std::size_t k = 1; k < factors.size(); ++k) acc = kron(acc, factors[k]);
    return acc;
}

Vec kron_chain(const std::vector<Vec>& factors) {
    std::vector<ConstSlice> slices(factors.begin(), factors.end());
    return kron_chain(slices);
}

std::vector<Vec> kron_chain_backward(std::span<const ConstSlice> factors,
                                     ConstSlice upstream) {
    const std::size_t q = chain_dim(factors);
    const std::size_t o = factors.size();
    std::size_t full = 1;
    for (std::size_t k = 0; k < o; ++k) {
        if (full > upstream.size()) break;
        full *= q;
    }
    require(upstream.size() == full, "kron_chain_backward: upstream length != q^o");

    std::vector<Vec> grads(o, Vec(q, 0.0));
    std::vector<std::size_t> digit(o, 0);
    for (std::size_t p = 0; p < full; ++p) {
        // digits of p in base q, last factor fastest
        std::size_t rem = p;
        for (std::size_t k = o; k-- > 0;) {
            digit[k] = rem % q;
            rem /= q;
        }
        const double up = upstream[p];
        for (std::size_t k = 0; k < o; ++k) {
            double prod = up;
            for (std::size_t l = 0; l < o; ++l)
                if (l != k) prod *= factors[l][digit[l]];
            grads[k][digit[k]] += prod;
        }
    }
    return grads;
}

std::vector<Vec> kron_chain_backward(const std::vector<Vec>& factors,
                                     const Vec& upstream) {
    std::vector<ConstSlice> slices(factors.begin(), factors.end());
    return kron_chain_backward(slices, upstream);
}

double finite_diff_check(const std::function<double(const Vec&)>& f,
                         const Vec& x, const Vec& analytic_grad, double eps) {
    require(eps > 0.0 && eps <= 1e-3, "finite_diff_check: eps must be in (0, 1e-3]");
    require(x.size() == analytic_grad.size(),
            "finite_diff_check: gradient size mismatch");
    double worst = 0.0;
    Vec probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + eps;
        const double fp = f(probe);
        probe[i] = x[i] - eps;
        const double fm = f(probe);
        probe[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("finite_diff_check: non-finite function value");
        const double g_fd = (fp - fm) / (2.0 * eps);
        const double g_an = analytic_grad[i];
        const double denom = std::max(1e-12, std::abs(g_fd) + std::abs(g_an));
        worst = std::max(worst, std::abs(g_fd - g_an) / denom);
    }
    return worst;
}

}  // namespace see
