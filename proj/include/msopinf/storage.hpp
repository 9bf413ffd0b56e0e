#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msopinf/types.hpp"

namespace msopinf {

/// On-disk container shared by snapshots, bases, reduced trajectories and
/// learned operators. Layout (all integers and floats little-endian):
///
///   magic "MSNAP1" | model str | n u64 | d u64 | dt f64 | nt u64
///   | meta count u32, (key str, value str)*
///   | section count u32, (name str, rows u64, cols u64, f64 column-major)*
///
/// where str = u32 length + bytes. Round-trips are bit-exact.
struct Container {
    std::string model;
    std::uint64_t n = 0;
    std::uint64_t d = 0;
    double dt = 0.0;
    std::uint64_t nt = 0;
    std::map<std::string, std::string> meta;
    std::vector<std::pair<std::string, Matrix>> sections;

    void save(const std::filesystem::path& path) const;
    static Container load(const std::filesystem::path& path);

    const Matrix* find(const std::string& name) const;
    const Matrix& require(const std::string& name) const;
};

/// FNV-1a 64-bit content hash, as a 16-digit hex string.
std::string fingerprint_bytes(const void* data, std::size_t size);
std::string fingerprint_string(const std::string& s);
std::string fingerprint_file(const std::filesystem::path& path);

}  // namespace msopinf
