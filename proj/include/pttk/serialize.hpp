#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "pttk/pttk.hpp"

namespace pttk {

/// I/O failure in the PTTK1 container: bad magic, kind/version mismatch,
/// CRC mismatch or truncation.
struct PttkIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// PTTK1 container: magic "PTTK1", one kind byte, then length-prefixed
// sections (u32 id, u64 byte count, payload, u32 CRC32 of the payload).
// All integers are little-endian u64 unless noted; matrix/core payloads are
// f64 in column-major order. The point sets are not stored; META records
// (seed, ns, nt) so generated-point workflows can rebuild them.

void save(const ParametricFactorization& f, const std::string& path);
void save(const GlobalFactorization& g, const std::string& path);

using LoadedFactorization = std::variant<ParametricFactorization, GlobalFactorization>;
LoadedFactorization load(const std::string& path);

ParametricFactorization load_parametric(const std::string& path);
GlobalFactorization load_global(const std::string& path);

/// Serialized size in bytes without writing to disk (storage accounting).
std::size_t serialized_size(const ParametricFactorization& f);
std::size_t serialized_size(const GlobalFactorization& g);

} // namespace pttk
