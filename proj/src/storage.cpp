#include "msopinf/storage.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace msopinf {

static_assert(std::endian::native == std::endian::little,
              "container format is little-endian; byte swapping is not implemented");

namespace {

constexpr char kMagic[6] = {'M', 'S', 'N', 'A', 'P', '1'};

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

void write_str(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

double read_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

std::string read_str(std::istream& is) {
    std::uint32_t len = read_u32(is);
    if (len > (1u << 20)) throw ConfigError("container: implausible string length");
    std::string s(len, '\0');
    is.read(s.data(), len);
    return s;
}

}  // namespace

void Container::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open for writing: " + path.string());
    os.write(kMagic, sizeof(kMagic));
    write_str(os, model);
    write_u64(os, n);
    write_u64(os, d);
    write_f64(os, dt);
    write_u64(os, nt);
    write_u32(os, static_cast<std::uint32_t>(meta.size()));
    for (const auto& [k, v] : meta) {
        write_str(os, k);
        write_str(os, v);
    }
    write_u32(os, static_cast<std::uint32_t>(sections.size()));
    for (const auto& [name, mat] : sections) {
        write_str(os, name);
        write_u64(os, static_cast<std::uint64_t>(mat.rows()));
        write_u64(os, static_cast<std::uint64_t>(mat.cols()));
        os.write(reinterpret_cast<const char*>(mat.data()),
                 static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(mat.size())));
    }
    if (!os) throw ConfigError("write failed: " + path.string());
}

Container Container::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path.string());
    char magic[6];
    is.read(magic, 6);
    if (!is || std::memcmp(magic, kMagic, 6) != 0)
        throw ConfigError("bad magic (not an MSNAP1 container): " + path.string());
    Container c;
    c.model = read_str(is);
    c.n = read_u64(is);
    c.d = read_u64(is);
    c.dt = read_f64(is);
    c.nt = read_u64(is);
    const std::uint32_t n_meta = read_u32(is);
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        std::string k = read_str(is);
        c.meta[k] = read_str(is);
    }
    const std::uint32_t n_sec = read_u32(is);
    for (std::uint32_t i = 0; i < n_sec; ++i) {
        std::string name = read_str(is);
        const auto rows = static_cast<Index>(read_u64(is));
        const auto cols = static_cast<Index>(read_u64(is));
        if (rows < 0 || cols < 0 || rows * cols > (Index(1) << 32))
            throw ConfigError("container: implausible section size");
        Matrix m(rows, cols);
        is.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
        c.sections.emplace_back(std::move(name), std::move(m));
    }
    if (!is) throw ConfigError("truncated container: " + path.string());
    return c;
}

const Matrix* Container::find(const std::string& name) const {
    for (const auto& [k, v] : sections)
        if (k == name) return &v;
    return nullptr;
}

const Matrix& Container::require(const std::string& name) const {
    const Matrix* m = find(name);
    if (!m) throw ConfigError("container: missing section '" + name + "'");
    return *m;
}

std::string fingerprint_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fingerprint_string(const std::string& s) { return fingerprint_bytes(s.data(), s.size()); }

std::string fingerprint_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open for fingerprint: " + path.string());
    std::string content((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return fingerprint_string(content);
}

}  // namespace msopinf
