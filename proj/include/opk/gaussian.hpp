// gaussian.hpp - H-valued Gaussian processes sampled from a kernel factorization

#pragma once

#include "opk/kernels.hpp"

#include <cstdint>
#include <vector>

namespace opk {

/// Draws are produced in chunks of this many samples; chunk c uses the
/// substream derived from (seed, c), so output does not depend on threading.
inline constexpr std::size_t kSampleChunk = 4096;

/// Deterministic stream of standard normals (splitmix64-seeded xoshiro256**,
/// Box-Muller transform).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t substream);

    double uniform();  // in (0, 1)
    double normal();

private:
    std::uint64_t next();

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct GaussianSampler {
    KernelFactorization factorization;
    std::uint64_t seed = 0;
};

/// samples[i] is N x d: row n is W(s_i) for draw n.
struct SampleBatch {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> samples;
};

/// W(s_i) = V_i* Z with one real standard-normal Z in R^rank shared by all points per draw.
SampleBatch sample(const GaussianSampler& sampler, std::size_t count, unsigned workers = 0);

/// (1/N) sum_n W(s_i)_n W(s_j)_n*
ComplexMatrix empirical_covariance(const SampleBatch& batch, std::size_t i, std::size_t j);

/// <W(s_i)_n, a> = W(s_i)_n* a for every draw n (real when the kernel and a are real).
ComplexVector scalar_projection_series(const SampleBatch& batch, std::size_t i, const ComplexVector& a);

} // namespace opk
