#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "lflx/field_ops.hpp"
#include "lflx/snapshot_io.hpp"

// This writer targets little-endian hosts (x86-64, aarch64); the layout is
// defined little-endian, so raw f64 writes are the wire format.

namespace lflx {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_exact(std::FILE* f, const void* p, std::size_t bytes, const std::string& path) {
    if (std::fwrite(p, 1, bytes, f) != bytes)
        throw SnapshotIoError(SnapshotIoError::Code::Io, "short write: " + path);
}

void read_exact(std::FILE* f, void* p, std::size_t bytes, const std::string& path) {
    if (std::fread(p, 1, bytes, f) != bytes)
        throw SnapshotIoError(SnapshotIoError::Code::Truncated, "truncated file: " + path);
}

}  // namespace

void write_snapshot_file(const std::string& path, const SnapshotFileData& data) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw SnapshotIoError(SnapshotIoError::Code::Io, "cannot open for write: " + path);
    const Grid& g = data.velocity.grid();
    const char magic[4] = {'L', 'F', 'L', 'X'};
    const std::uint16_t version = data.version;
    const std::uint16_t dim = static_cast<std::uint16_t>(g.dim());
    const std::uint32_t n = static_cast<std::uint32_t>(g.n());
    const std::uint32_t ncomp = static_cast<std::uint32_t>(data.velocity.components());
    const std::uint8_t flag = data.has_pressure ? 1 : 0;

    write_exact(f.get(), magic, 4, path);
    write_exact(f.get(), &version, 2, path);
    write_exact(f.get(), &dim, 2, path);
    write_exact(f.get(), &n, 4, path);
    write_exact(f.get(), &ncomp, 4, path);
    write_exact(f.get(), &data.nu, 8, path);
    write_exact(f.get(), &data.t, 8, path);
    write_exact(f.get(), &flag, 1, path);
    write_exact(f.get(), data.velocity.raw().data(), data.velocity.raw().size() * 8, path);
    if (data.has_pressure) {
        if (data.pressure.grid() != g || data.pressure.components() != 1)
            throw SnapshotIoError(SnapshotIoError::Code::BadHeader,
                                  "pressure block shape mismatch: " + path);
        write_exact(f.get(), data.pressure.raw().data(), data.pressure.raw().size() * 8, path);
    }
}

SnapshotFileData read_snapshot_file(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw SnapshotIoError(SnapshotIoError::Code::Io, "cannot open: " + path);

    char magic[4];
    read_exact(f.get(), magic, 4, path);
    if (std::memcmp(magic, "LFLX", 4) != 0)
        throw SnapshotIoError(SnapshotIoError::Code::BadMagic, "bad magic: " + path);
    std::uint16_t version, dim;
    std::uint32_t n, ncomp;
    double nu, t;
    std::uint8_t flag;
    read_exact(f.get(), &version, 2, path);
    if (version != kSnapshotFormatVersion)
        throw SnapshotIoError(SnapshotIoError::Code::BadVersion,
                              "unsupported format version " + std::to_string(version) + ": " + path);
    read_exact(f.get(), &dim, 2, path);
    read_exact(f.get(), &n, 4, path);
    read_exact(f.get(), &ncomp, 4, path);
    read_exact(f.get(), &nu, 8, path);
    read_exact(f.get(), &t, 8, path);
    read_exact(f.get(), &flag, 1, path);
    if (dim != 2 && dim != 3)
        throw SnapshotIoError(SnapshotIoError::Code::BadHeader, "bad dim: " + path);
    if (n < 8 || (n & (n - 1)) != 0 || n > (1u << 14))
        throw SnapshotIoError(SnapshotIoError::Code::BadHeader, "bad n: " + path);
    if (ncomp < 1 || ncomp > 3)
        throw SnapshotIoError(SnapshotIoError::Code::BadHeader, "bad component count: " + path);

    SnapshotFileData data{version, nu, t, flag != 0, RealField(Grid(dim, n), ncomp),
                          RealField(Grid(dim, n), 1)};
    read_exact(f.get(), data.velocity.raw().data(), data.velocity.raw().size() * 8, path);
    if (data.has_pressure)
        read_exact(f.get(), data.pressure.raw().data(), data.pressure.raw().size() * 8, path);
    return data;
}

void save_snapshot(const std::string& path, const Snapshot& s, double nu, bool with_pressure) {
    SnapshotFileData data{kSnapshotFormatVersion,
                          nu,
                          s.t,
                          with_pressure,
                          to_real(s.u),
                          with_pressure ? to_real(s.p) : RealField(s.u.grid(), 1)};
    write_snapshot_file(path, data);
}

LoadedSnapshot load_snapshot(const std::string& path) {
    SnapshotFileData data = read_snapshot_file(path);
    LoadedSnapshot out{Snapshot{data.t, to_spectral(data.velocity),
                                SpectralField(data.velocity.grid(), 1)},
                       data.nu, false, 0.0};
    if (data.has_pressure) out.snap.p = to_spectral(data.pressure);
    if (out.snap.u.components() == data.velocity.grid().dim()) {
        const double norm = l2_norm_spectral(out.snap.u);
        if (norm > 0.0) {
            out.divergence_rel = max_divergence(out.snap.u) / norm;
            out.divergence_warning = out.divergence_rel > 1e-8;
        }
    }
    return out;
}

}  // namespace lflx
