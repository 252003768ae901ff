// Shared helpers: deterministic RNG, hashing, string utils, atomic file writes.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace evdet {

// Bad user input (files, configs, CLI values). Maps to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

uint64_t splitmix64(uint64_t x);

// Combine a seed with a stream id (fold index, round index, chain index...).
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

// Deterministic RNG. All draws go through explicit mappings so results are
// identical across standard libraries (std::shuffle and distributions are not).
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

    uint64_t next_u64() { return gen_(); }

    // uniform in [0, n)
    std::size_t uniform_index(std::size_t n);

    // uniform in [0, 1) with 53-bit resolution
    double uniform01();

private:
    std::mt19937_64 gen_;
};

// Fisher-Yates using Rng::uniform_index.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.uniform_index(i);
        std::swap(v[i - 1], v[j]);
    }
}

uint64_t fnv1a64(const std::string& data);
std::string to_hex(uint64_t value);

std::string lowercase_ascii(std::string s);
std::vector<std::string> split(const std::string& s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Three decimals, truncated toward zero ("0.7037" -> "0.703").
std::string format_f3_trunc(double value);

// Full-precision shortest round-trip formatting for report JSON.
std::string format_full(double value);

// Write then rename, so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Run fn(i) for i in [0, n) on up to `jobs` threads. fn must only touch
// per-index state. jobs <= 1 runs inline.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace evdet
