#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lflx/field.hpp"
#include "lflx/snapshot.hpp"
#include "lflx/synthetic.hpp"

namespace lflx {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CflError : SolverError {
    using SolverError::SolverError;
};
struct BlowupError : SolverError {
    using SolverError::SolverError;
};

/// Time-independent deterministic body force, solenoidal and mean-free.
struct ForcingSpec {
    enum class Kind { None, FixedLowMode };
    Kind kind = Kind::None;
    double amplitude = 0.0;
    int k_f = 1;
};

struct InitialSpec {
    enum class Kind { Zero, Shear, TaylorGreen, TaylorGreenPerturbed, RandomBesov, SingleMode };
    Kind kind = Kind::TaylorGreen;
    SyntheticSpec synth;        // RandomBesov / SingleMode parameters
    double perturbation = 0.01; // TaylorGreenPerturbed: relative L2 amplitude
};

struct SolverConfig {
    Grid grid{2, 64};
    double nu = 1e-3;
    double dt = 1e-3;
    double t_end = 1.0;
    ForcingSpec forcing;
    InitialSpec initial;
    int snapshot_stride = 10;
    double cfl_safety = 0.5;
    double blowup_factor = 1e3;

    void validate() const;
};

SpectralField forcing_field(const Grid& grid, const ForcingSpec& spec);
SpectralField initial_field(const Grid& grid, const InitialSpec& spec);

/// Mean-free pressure from -lap p = grad grad : (u x u), with the same
/// dealiased tensor product the time stepper uses.
SpectralField solve_pressure(const SpectralField& u);

Snapshot make_snapshot(double t, const SpectralField& u);

/// Classical RK4 with exact integrating factor exp(-nu |k|^2 dt) for the
/// viscous term; the nonlinearity is -P div T_K(u x u) + f.
class TimeStepper {
  public:
    explicit TimeStepper(const SolverConfig& cfg);
    ~TimeStepper();

    /// Advance u by one step of size dt (or `dt_override` > 0).
    void step(SpectralField& u, double& t, double dt_override = 0.0);

    double last_max_velocity() const;
    const SpectralField& forcing() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Single-step convenience mirroring the stepper on a Snapshot.
Snapshot step(const Snapshot& s, const SolverConfig& cfg);

/// Per-step energy budget: E(t) = ||u||_2^2 / 2, viscous dissipation rate
/// nu ||grad u||_2^2, injection rate int u.f, plus running integrals
/// (Simpson over the stored per-step samples).
struct BudgetSeries {
    std::vector<double> t;
    std::vector<double> kinetic_energy;
    std::vector<double> dissipation_rate;
    std::vector<double> injection_rate;
    std::vector<double> cum_dissipation;
    std::vector<double> cum_injection;

    void finalize();  // fills the cumulative integrals

    /// |E(T) - E(0) + int diss - int inj| / int diss  (global balance, D = 0)
    double balance_residual_rel() const;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    BudgetSeries budgets;
};

using SnapshotObserver = std::function<void(const Snapshot&)>;

RunResult run(const SolverConfig& cfg);
RunResult run(const SolverConfig& cfg, const SnapshotObserver& observer, bool keep_snapshots);

}  // namespace lflx
