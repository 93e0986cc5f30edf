#pragma once

#include <functional>
#include <span>
#include <vector>

namespace see {

using Vec = std::vector<double>;
using ConstSlice = std::span<const double>;

/// Kronecker product of two vectors with the first operand varying slowest:
/// out[a * y.size() + b] = x[a] * y[b].
Vec kron(ConstSlice x, ConstSlice y);

/// Left fold of kron over a chain of o factors of common length q.
/// Result has length q^o and row-major (last factor fastest) layout.
/// A chain of one factor returns a copy of that factor.
Vec kron_chain(std::span<const ConstSlice> factors);
Vec kron_chain(const std::vector<Vec>& factors);

/// Gradient of dot(upstream, kron_chain(factors)) with respect to every
/// factor. upstream must have length q^o; the k-th result has length q.
std::vector<Vec> kron_chain_backward(std::span<const ConstSlice> factors,
                                     ConstSlice upstream);
std::vector<Vec> kron_chain_backward(const std::vector<Vec>& factors,
                                     const Vec& upstream);

/// Compares a central-difference gradient of f at x against analytic_grad
/// and returns the max over entries of
///   |g_fd - g_an| / max(1e-12, |g_fd| + |g_an|).
/// eps must lie in (0, 1e-3]. Throws if f evaluates to a non-finite value.
double finite_diff_check(const std::function<double(const Vec&)>& f,
                         const Vec& x, const Vec& analytic_grad, double eps);

}  // namespace see
