#pragma once

#include <random>
#include <string>
#include <vector>

#include "tflab/fio.hpp"
#include "tflab/gabor.hpp"
#include "tflab/lattice_matrix.hpp"
#include "tflab/psdo.hpp"

namespace tflab::testing
{
    /// Default desk grid: L = 16, N = 512, Gaussian window, alpha = beta = 1/2, R = 5.
    GaborSystem default_system(Real radius = 5);

    /// Sum of three dilated, shifted, modulated Gaussians well inside [-1, 1]^2 in
    /// phase space, normalized to unit L^2 norm.
    SampledSignal random_atom_signal(std::mt19937& rng, Real L, Eigen::Index N);

    /// chi(y, eta) = (y, y + eta) as a phase-space map.
    PhaseMap chirp_chi();

    /// Smoothed indicator of the disk of radius r: a C-infinity step of width w.
    PhaseFn smooth_disk(Real r, Real w = 1);

    struct BatteryCase
    {
        std::string name;
        LatticeMatrix A;
        LatticeMap psi;
        bool expect_compact = false;
    };

    /// identity; diagonal 1/(1+|lambda|); finite rank; chirp FIO with compact bump;
    /// chirp FIO with sigma = 1; Weyl form of a localization operator with a smooth disk.
    std::vector<BatteryCase> operator_battery(const GaborSystem& sys);
}  // namespace tflab::testing
