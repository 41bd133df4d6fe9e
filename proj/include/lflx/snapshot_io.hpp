#pragma once

#include <cstdint>
#include <string>

#include "lflx/snapshot.hpp"

namespace lflx {

/// Binary snapshot layout (little-endian):
///   magic "LFLX" | u16 version | u16 dim | u32 n | u32 components |
///   f64 nu | f64 t | u8 pressure flag |
///   velocity samples (components * n^dim f64, row-major, component-contiguous)
///   [ pressure samples (n^dim f64) if flagged ]
inline constexpr std::uint16_t kSnapshotFormatVersion = 1;

struct SnapshotIoError : std::runtime_error {
    enum class Code { BadMagic, BadVersion, BadHeader, Truncated, Io };
    Code code;
    SnapshotIoError(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

/// Raw file payload; the doubles written are the doubles read back,
/// bit-exactly.
struct SnapshotFileData {
    std::uint16_t version = kSnapshotFormatVersion;
    double nu = 0.0;
    double t = 0.0;
    bool has_pressure = false;
    RealField velocity;
    RealField pressure;  // valid when has_pressure
};

void write_snapshot_file(const std::string& path, const SnapshotFileData& data);
SnapshotFileData read_snapshot_file(const std::string& path);

void save_snapshot(const std::string& path, const Snapshot& s, double nu,
                   bool with_pressure = true);

struct LoadedSnapshot {
    Snapshot snap;
    double nu = 0.0;
    bool divergence_warning = false;  // spectral divergence above 1e-8 (externally produced data)
    double divergence_rel = 0.0;
};
LoadedSnapshot load_snapshot(const std::string& path);

}  // namespace lflx
