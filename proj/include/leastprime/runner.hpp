#pragma once

// Batch computation of P(n) over a modulus range.
//
// Workers claim contiguous chunks of moduli from a shared counter and compute
// them against one immutable PrimeTable. A single writer appends completed
// chunks in order of n, so the output does not depend on the worker count or
// chunk size, and updates the checkpoint after every chunk.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "leastprime/pmin.hpp"
#include "leastprime/primes.hpp"
#include "leastprime/result_io.hpp"

namespace leastprime {

struct RunManifest {
    std::uint64_t from = 3;
    std::uint64_t to = 0;
    Strategy strategy = Strategy::hybrid;
    unsigned workers = 1;
    std::uint64_t prime_limit = 0; // 0: default_prime_limit(to)
    std::filesystem::path checkpoint_path;
    std::filesystem::path output_path;
    std::uint64_t chunk = 1024;
    SieveConfig sieve;

    // Throws InvalidArgument naming the first broken invariant.
    void validate() const;
    std::uint64_t effective_prime_limit() const;
    ResultHeader header() const { return {from, to, strategy}; }
};

struct RunHooks {
    // Called after each chunk is durable. Returning false stops the run as if
    // the process had been killed at that point.
    std::function<bool(std::uint64_t chunks_written, std::uint64_t last_n)> after_chunk;
    // Progress and repair messages. Defaults to stderr.
    std::function<void(std::string_view)> log;
    // Seconds between progress lines.
    double progress_interval = 30;
};

struct RunReport {
    std::uint64_t first_n = 0;         // first modulus computed by this call
    std::uint64_t records_written = 0; // by this call
    std::uint64_t last_n = 0;          // last modulus present in the file
    unsigned table_extensions = 0;
    bool completed = false;
    bool interrupted = false;
    std::uint64_t repaired_bytes = 0;  // tail bytes dropped by resume
};

// Fresh run: truncates the output, writes the header and computes [from, to).
RunReport run_range(const RunManifest& manifest, const RunHooks& hooks = {});

// Continues an interrupted run. Refuses (IntegrityFailure) when the file
// header or checkpoint disagrees with the manifest; truncates a torn or
// invalid tail back to the last valid record.
RunReport resume(const RunManifest& manifest, const RunHooks& hooks = {});

} // namespace leastprime
