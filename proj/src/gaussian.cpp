// gaussian.cpp

#include "opk/gaussian.hpp"

#include "opk/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace opk {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t substream) {
    std::uint64_t x = seed;
    const std::uint64_t salt = splitmix64(x) ^ (substream * 0xD1B54A32D192ED03ULL);
    x = salt;
    for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t NormalStream::next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double NormalStream::uniform() {
    // 53 random bits, shifted off zero
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

SampleBatch sample(const GaussianSampler& sampler, std::size_t count, unsigned workers) {
    const KernelFactorization& f = sampler.factorization;
    const std::size_t m = f.blocks.size();
    const auto d = static_cast<Eigen::Index>(f.dim);
    const auto r = static_cast<Eigen::Index>(f.rank);
    const auto n = static_cast<Eigen::Index>(count);

    SampleBatch batch;
    batch.count = count;
    batch.dim = f.dim;
    batch.labels = f.labels;
    batch.samples.assign(m, ComplexMatrix::Zero(n, d));
    if (count == 0 || r == 0) return batch;

    // W(s_i)^T for a block of draws is Z^T conj(V_i): rows are draws
    std::vector<ComplexMatrix> transposed_adjoints;
    transposed_adjoints.reserve(m);
    for (const auto& v : f.blocks) transposed_adjoints.push_back(v.conjugate());

    const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * kSampleChunk;
        const std::size_t len = std::min(kSampleChunk, count - begin);
        NormalStream stream(sampler.seed, c);
        Eigen::MatrixXd z(static_cast<Eigen::Index>(len), r);
        for (Eigen::Index row = 0; row < z.rows(); ++row)
            for (Eigen::Index k = 0; k < r; ++k) z(row, k) = stream.normal();
        const ComplexMatrix zc = z.cast<Complex>();
        for (std::size_t i = 0; i < m; ++i)
            batch.samples[i].middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(len)) =
                zc * transposed_adjoints[i];
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
        return batch;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t c = next++; c < chunks; c = next++) run_chunk(c);
            });
    }
    return batch;
}

ComplexMatrix empirical_covariance(const SampleBatch& batch, std::size_t i, std::size_t j) {
    if (batch.count == 0) throw Error(ErrorKind::EmptyBatch, "empirical_covariance: no samples");
    if (i >= batch.samples.size() || j >= batch.samples.size())
        throw Error(ErrorKind::DimensionMismatch, "empirical_covariance: point index out of range");
    // rows are samples: sum_n w_i,n w_j,n* = W_i^T conj(W_j)
    return batch.samples[i].transpose() * batch.samples[j].conjugate() / static_cast<double>(batch.count);
}

ComplexVector scalar_projection_series(const SampleBatch& batch, std::size_t i, const ComplexVector& a) {
    if (i >= batch.samples.size())
        throw Error(ErrorKind::DimensionMismatch, "scalar_projection_series: point index out of range");
    if (a.size() != static_cast<Eigen::Index>(batch.dim))
        throw Error(ErrorKind::DimensionMismatch, "scalar_projection_series: vector length differs from dim");
    // row n of samples is W^T, so W* a = conj(row) . a
    return batch.samples[i].conjugate() * a;
}

} // namespace opk
