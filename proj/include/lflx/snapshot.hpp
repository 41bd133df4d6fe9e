#pragma once

#include "lflx/field.hpp"

namespace lflx {

/// One stored state of a run: divergence-free velocity plus the mean-free
/// pressure consistent with it.
struct Snapshot {
    double t;
    SpectralField u;
    SpectralField p;
};

}  // namespace lflx
